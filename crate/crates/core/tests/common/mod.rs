#![allow(dead_code)]

use isolambda::{parse_program, parse_term, Calculus, Term};

pub fn t(s: &str) -> Term {
    parse_term(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn example(name: &str) -> Term {
    let path = format!("{}/examples/{name}.lam", env!("CARGO_MANIFEST_DIR"));
    let src = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    parse_program(&src).unwrap_or_else(|e| panic!("{path}:{e}")).term
}

/// `got` and `want` are the same sets of terms modulo `≡*`.
pub fn same_modulo(calc: &Calculus, got: &[Term], want: &[Term]) -> bool {
    let covers = |xs: &[Term], ys: &[Term]| {
        xs.iter()
            .all(|x| ys.iter().any(|y| calc.equiv_star(x, y).expect("class enumeration")))
    };
    covers(got, want) && covers(want, got)
}

/// Normal forms, or an explanation.
pub fn nfs(calc: &Calculus, term: &Term) -> Vec<Term> {
    calc.normalize_all(term).unwrap_or_else(|e| panic!("{term}: {e}"))
}
