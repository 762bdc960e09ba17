//! Types are identified up to isomorphism: a term typed at one type also
//! checks at every isomorphic one.
//!
//!   cargo run --example typecheck

use isolambda::typing::{check, infer};
use isolambda::{parse_term, parse_type};

fn main() {
    let pair = parse_term(r"r:A + \x:B. s:C").unwrap();
    let typed = infer(&pair).unwrap();
    println!("{pair}\n  : {}\n  canonical {}", typed.ty, typed.canonical);

    for ty in [r"(B -> C) /\ A", r"A /\ (B -> C)", r"A /\ B -> C", "A"] {
        let ok = check(&pair, &parse_type(ty).unwrap()).unwrap();
        println!("  checks at {ty}: {ok}");
    }

    // A projection picks a conjunct by type, not by position.
    let f = parse_term(r"pi[B -> A /\ C](\x:B. (a:A + c:C))").unwrap();
    println!("{f}\n  : {}", infer(&f).unwrap().ty);

    match infer(&parse_term(r"(\x:A. x) y:B").unwrap()) {
        Ok(_) => unreachable!(),
        Err(e) => println!("ill typed: {e}"),
    }
}
