//! Pairs, lists and booleans whose projections are deterministic even
//! though `+` is commutative.
//!
//!   cargo run --example encodings

use isolambda::encodings::{canon, cocanon, mk_bool, mk_fst, mk_ite, mk_list, mk_nth, mk_pair, mk_snd, naive_bool};
use isolambda::typing::infer;
use isolambda::{parse_term, Calculus, Term, Type};

fn report(calc: &Calculus, what: &str, t: &Term) {
    let nfs: Vec<String> = calc.normalize_all(t).unwrap().iter().map(Term::to_string).collect();
    println!("{what}: {{{}}}", nfs.join(", "));
}

fn main() {
    let calc = Calculus::standard();
    let (r, s) = (parse_term("r:A").unwrap(), parse_term("s:A").unwrap());

    let p = mk_pair(&r, &s).unwrap();
    println!("<r, s> = {p}\n  : {}", infer(&p).unwrap().ty);
    report(&calc, "fst", &mk_fst(&p).unwrap());
    report(&calc, "snd", &mk_snd(&p).unwrap());

    let items: Vec<Term> = ["a", "b", "c"].iter().map(|x| Term::free(x, Type::atom("A"))).collect();
    let list = mk_list(&items).unwrap();
    for i in 0..items.len() {
        report(&calc, &format!("nth {i}"), &mk_nth(&list, i).unwrap());
    }

    let a = Type::atom("A");
    let x = parse_term("x:B").unwrap();
    report(&calc, "cocanon(canon(x))", &cocanon(&canon(&x, &a), &Type::arrow(a.clone(), Type::atom("B"))).unwrap());

    for v in [true, false] {
        report(&calc, &format!("if {v} then r else s"), &mk_ite(&mk_bool(v, &a), &r, &s).unwrap());
        let naive = Term::apps(naive_bool(v, &a), [r.clone(), s.clone()]);
        report(&calc, &format!("naive {v} r s"), &naive);
    }
}
