//! The measures `S` (symbol count), `P` (how many `+` a term may expose)
//! and `M` (a bound on the size of every equivalent term).
//!
//! `P` and `M` are invariant under the term equivalence, which is what makes
//! equivalence classes finite.

use serde::Serialize;

use crate::syntax::{Term, TermKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MeasureTriple {
    pub s: u64,
    pub p: u64,
    pub m: u64,
}

const OVERFLOW: &str = "measure overflows 64 bits";

/// Variables, `λ` and `π` symbols.
pub fn size_s(t: &Term) -> u64 {
    match t.kind() {
        TermKind::Free(..) | TermKind::Bound(..) => 1,
        TermKind::Lam(_, _, r) | TermKind::Proj(_, r) => 1 + size_s(r),
        TermKind::App(r, s) | TermKind::Sum(r, s) => size_s(r) + size_s(s),
    }
}

pub fn potential_p(t: &Term) -> u64 {
    match t.kind() {
        TermKind::Free(..) | TermKind::Bound(..) => 0,
        TermKind::Lam(_, _, r) | TermKind::Proj(_, r) | TermKind::App(r, _) => potential_p(r),
        TermKind::Sum(r, s) => 1 + potential_p(r) + potential_p(s),
    }
}

pub fn measure_m(t: &Term) -> u64 {
    triple(t).m
}

/// All three measures in one pass.
pub fn triple(t: &Term) -> MeasureTriple {
    let add = |a: u64, b: u64| a.checked_add(b).expect(OVERFLOW);
    let mul = |a: u64, b: u64| a.checked_mul(b).expect(OVERFLOW);
    match t.kind() {
        TermKind::Free(..) | TermKind::Bound(..) => MeasureTriple { s: 1, p: 0, m: 1 },
        TermKind::Lam(_, _, r) | TermKind::Proj(_, r) => {
            let r = triple(r);
            MeasureTriple {
                s: add(1, r.s),
                p: r.p,
                m: add(add(1, r.m), r.p),
            }
        }
        TermKind::App(r, s) => {
            let (r, s) = (triple(r), triple(s));
            MeasureTriple {
                s: add(r.s, s.s),
                p: r.p,
                m: add(add(r.m, s.m), mul(r.p, s.m)),
            }
        }
        TermKind::Sum(r, s) => {
            let (r, s) = (triple(r), triple(s));
            MeasureTriple {
                s: add(r.s, s.s),
                p: add(add(1, r.p), s.p),
                m: add(r.m, s.m),
            }
        }
    }
}
