//! Without commutativity and associativity sums are positional and
//! projections pick the leftmost match.
//!
//!   cargo run --example deterministic

use isolambda::{parse_term, Calculus, Term};

fn main() {
    let (std, det) = (Calculus::standard(), Calculus::deterministic());
    for src in ["pi[A](r:A + s:A)", r"(\x:A. \y:A. y) (r:A + s:A)", "pi[A](r:A + (s:A + u:A))"] {
        let t = parse_term(src).unwrap();
        let show = |c: &Calculus| -> String {
            let v: Vec<String> = c.normalize_all(&t).unwrap().iter().map(Term::to_string).collect();
            v.join(", ")
        };
        println!("{t}\n  standard:      {{{}}}\n  deterministic: {{{}}}", show(&std), show(&det));
    }
}
