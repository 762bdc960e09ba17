use std::collections::{BTreeMap, BTreeSet};

use super::{Ident, Term, TermKind, Type};
use crate::type_canon::{type_equiv_in, Mode};

/// Turns free occurrences of `name` into bound occurrences of the binder
/// sitting `depth` levels up.
pub(super) fn close(t: &Term, name: &str, depth: u32) -> Term {
    match t.kind() {
        TermKind::Free(x, ty) if &**x == name => Term::bound(depth, ty.clone()),
        TermKind::Free(..) | TermKind::Bound(..) => t.clone(),
        TermKind::Lam(h, ty, b) => Term::lam_raw(h.0.clone(), ty.clone(), close(b, name, depth + 1)),
        TermKind::App(a, b) => Term::app(close(a, name, depth), close(b, name, depth)),
        TermKind::Sum(a, b) => Term::sum(close(a, name, depth), close(b, name, depth)),
        TermKind::Proj(ty, b) => Term::proj(ty.clone(), close(b, name, depth)),
    }
}

pub(super) fn shift(t: &Term, delta: i64, cutoff: u32) -> Term {
    if delta == 0 || max_loose(t, cutoff).is_none() {
        return t.clone();
    }
    match t.kind() {
        TermKind::Bound(i, ty) if *i >= cutoff => {
            let j = *i as i64 + delta;
            assert!(j >= 0, "negative de Bruijn index after shift");
            Term::bound(j as u32, ty.clone())
        }
        TermKind::Free(..) | TermKind::Bound(..) => t.clone(),
        TermKind::Lam(h, ty, b) => Term::lam_raw(h.0.clone(), ty.clone(), shift(b, delta, cutoff + 1)),
        TermKind::App(a, b) => Term::app(shift(a, delta, cutoff), shift(b, delta, cutoff)),
        TermKind::Sum(a, b) => Term::sum(shift(a, delta, cutoff), shift(b, delta, cutoff)),
        TermKind::Proj(ty, b) => Term::proj(ty.clone(), shift(b, delta, cutoff)),
    }
}

/// Largest loose index relative to `depth`, i.e. an index `>= depth`.
pub(super) fn max_loose(t: &Term, depth: u32) -> Option<u32> {
    match t.kind() {
        TermKind::Bound(i, _) if *i >= depth => Some(*i - depth),
        TermKind::Free(..) | TermKind::Bound(..) => None,
        TermKind::Lam(_, _, b) => max_loose(b, depth + 1),
        TermKind::Proj(_, b) => max_loose(b, depth),
        TermKind::App(a, b) | TermKind::Sum(a, b) => max_loose(a, depth).max(max_loose(b, depth)),
    }
}

pub(super) fn instantiate(body: &Term, arg: &Term) -> Term {
    fn go(t: &Term, arg: &Term, depth: u32) -> Term {
        if max_loose(t, depth).is_none() {
            return t.clone();
        }
        match t.kind() {
            TermKind::Bound(i, ty) => {
                if *i == depth {
                    shift(arg, depth as i64, 0)
                } else if *i > depth {
                    Term::bound(i - 1, ty.clone())
                } else {
                    t.clone()
                }
            }
            TermKind::Free(..) => t.clone(),
            TermKind::Lam(h, ty, b) => Term::lam_raw(h.0.clone(), ty.clone(), go(b, arg, depth + 1)),
            TermKind::App(a, b) => Term::app(go(a, arg, depth), go(b, arg, depth)),
            TermKind::Sum(a, b) => Term::sum(go(a, arg, depth), go(b, arg, depth)),
            TermKind::Proj(ty, b) => Term::proj(ty.clone(), go(b, arg, depth)),
        }
    }
    go(body, arg, 0)
}

/// `FV(t)` as name/annotation pairs.
pub fn free_vars(t: &Term) -> BTreeSet<(Ident, Type)> {
    let mut out = BTreeSet::new();
    fn go(t: &Term, out: &mut BTreeSet<(Ident, Type)>) {
        match t.kind() {
            TermKind::Free(x, ty) => {
                out.insert((x.clone(), ty.clone()));
            }
            _ => t.children().into_iter().for_each(|c| go(c, out)),
        }
    }
    go(t, &mut out);
    out
}

/// `vars(t) = FV(t) ∪ BV(t)`; bound variables are reported under the name
/// their binder was written with.
pub fn all_vars(t: &Term) -> BTreeSet<(Ident, Type)> {
    let mut out = BTreeSet::new();
    fn go(t: &Term, scope: &mut Vec<Ident>, out: &mut BTreeSet<(Ident, Type)>) {
        match t.kind() {
            TermKind::Free(x, ty) => {
                out.insert((x.clone(), ty.clone()));
            }
            TermKind::Bound(i, ty) => {
                if let Some(name) = scope.len().checked_sub(*i as usize + 1).map(|k| scope[k].clone()) {
                    out.insert((name, ty.clone()));
                }
            }
            TermKind::Lam(h, ty, b) => {
                out.insert((h.0.clone(), ty.clone()));
                scope.push(h.0.clone());
                go(b, scope, out);
                scope.pop();
            }
            _ => t.children().into_iter().for_each(|c| go(c, scope, out)),
        }
    }
    go(t, &mut Vec::new(), &mut out);
    out
}

/// True iff no name carries two non-equivalent annotations.
pub fn is_functional<'a>(vs: impl IntoIterator<Item = &'a (Ident, Type)>) -> bool {
    is_functional_in(Mode::Standard, vs)
}

pub fn is_functional_in<'a>(mode: Mode, vs: impl IntoIterator<Item = &'a (Ident, Type)>) -> bool {
    let mut seen: BTreeMap<&Ident, &Type> = BTreeMap::new();
    for (x, ty) in vs {
        match seen.get(x) {
            Some(prev) if !type_equiv_in(mode, prev, ty) => return false,
            Some(_) => {}
            None => {
                seen.insert(x, ty);
            }
        }
    }
    true
}

/// Capture-avoiding `r[s/x]`: replaces the free occurrences of `x` whose
/// annotation is equivalent to `ann`.
pub fn subst_term(r: &Term, s: &Term, x: &str, ann: &Type) -> Term {
    fn go(t: &Term, s: &Term, x: &str, ann: &Type, depth: u32) -> Term {
        match t.kind() {
            TermKind::Free(y, ty) if &**y == x && type_equiv_in(Mode::Standard, ty, ann) => {
                shift(s, depth as i64, 0)
            }
            TermKind::Free(..) | TermKind::Bound(..) => t.clone(),
            TermKind::Lam(h, ty, b) => Term::lam_raw(h.0.clone(), ty.clone(), go(b, s, x, ann, depth + 1)),
            TermKind::App(a, b) => Term::app(go(a, s, x, ann, depth), go(b, s, x, ann, depth)),
            TermKind::Sum(a, b) => Term::sum(go(a, s, x, ann, depth), go(b, s, x, ann, depth)),
            TermKind::Proj(ty, b) => Term::proj(ty.clone(), go(b, s, x, ann, depth)),
        }
    }
    go(r, s, x, ann, 0)
}

/// `r[a/b]`: every syntactic occurrence of `b` inside an annotation becomes `a`.
pub fn subst_type(r: &Term, a: &Type, b: &Type) -> Term {
    r.map_types(&mut |ty| ty.replace(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn t(src: &str) -> Term {
        parse_term(src).unwrap()
    }

    fn set(items: &[(&str, &str)]) -> BTreeSet<(Ident, Type)> {
        items
            .iter()
            .map(|(x, ty)| (Ident::from(*x), crate::syntax::parse_type(ty).unwrap()))
            .collect()
    }

    #[test]
    fn free_and_all_vars() {
        let r = t(r"\x:A->B->C. x y:A z:B");
        assert_eq!(free_vars(&r), set(&[("y", "A"), ("z", "B")]));
        assert_eq!(all_vars(&r), set(&[("x", "A->B->C"), ("y", "A"), ("z", "B")]));
        assert!(free_vars(&t(r"\x:A. x")).is_empty());
        assert_eq!(free_vars(&t("x:A + x:A")), set(&[("x", "A")]));
        assert_eq!(all_vars(&t("x:A")), set(&[("x", "A")]));
        assert_eq!(all_vars(&t(r"\x:A. y:B")), set(&[("x", "A"), ("y", "B")]));
    }

    #[test]
    fn functional_sets() {
        assert!(is_functional(&set(&[("x", "A"), ("y", "A->B")])));
        assert!(!is_functional(&set(&[("x", "A"), ("x", "A->B")])));
        assert!(is_functional(&set(&[("x", r"A/\B"), ("x", r"B/\A")])));
        assert!(!is_functional_in(Mode::Deterministic, &set(&[("x", r"A/\B"), ("x", r"B/\A")])));
    }

    #[test]
    fn term_substitution() {
        let a = Type::atom("A");
        let s = t("s:A");
        assert_eq!(subst_term(&t("x:A"), &s, "x", &a), s);
        let id = t(r"\x:A. x");
        assert_eq!(subst_term(&id, &s, "x", &a), id);
        let r = t(r"\y:B. x:A y");
        let out = subst_term(&r, &t("y:B"), "x", &a);
        assert_eq!(out.to_string(), r"\y':B. y:B y'");
    }

    #[test]
    fn type_substitution() {
        let a = Type::atom("A");
        let b = Type::atom("B");
        assert_eq!(subst_type(&t(r"x:B/\C"), &a, &b), t(r"x:A/\C"));
        assert_eq!(subst_type(&t(r"\x:B. x"), &a, &b), t(r"\x:A. x"));
        assert_eq!(subst_type(&t("x:A"), &a, &b), t("x:A"));
    }

    #[test]
    fn instantiate_under_binders_shifts_argument() {
        // λz.((λx.λy.x) w) with w bound to z: the contractum keeps pointing at z.
        let a = Type::atom("A");
        let body = Term::lam_raw("y".into(), a.clone(), Term::bound(1, a.clone()));
        let arg = Term::bound(0, a.clone());
        let out = Term::instantiate(&body, &arg);
        assert_eq!(out, Term::lam_raw("y".into(), a.clone(), Term::bound(1, a)));
    }
}
