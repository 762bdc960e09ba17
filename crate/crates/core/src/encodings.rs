//! Labelled pairs and lists, canon/cocanon, and booleans that stay
//! deterministic even though `+` is commutative.
//!
//! Labels live in the reserved `#` namespace, which the parser never
//! produces, so they cannot collide with user atoms.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{all_vars, fresh_name, Ident, Term, Type};
use crate::type_canon::{type_equiv, ConjFree};
use crate::typing::{self, TypeError};

#[derive(Debug, Error)]
pub enum EncodingError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("type mismatch: expected {expected}, found {found}")]
    Mismatch { expected: Type, found: Type },
}

/// Atom used as the dummy `A` in the boolean encoding.
pub const DUMMY: &str = "#0";

/// The `i`-th label type, `#i -> #i`. Distinct indices give non-equivalent
/// types, and each one is inhabited by a closed identity.
pub fn label(i: usize) -> Type {
    let a = Type::atom(&format!("#{i}"));
    Type::arrow(a.clone(), a)
}

/// `λy^{#i}.y`, the closed inhabitant of `label(i)`.
pub fn label_witness(i: usize) -> Term {
    let a = Type::atom(&format!("#{i}"));
    Term::lam_raw(Arc::from("y"), a.clone(), Term::bound(0, a))
}

fn label_index(c: &ConjFree) -> Option<usize> {
    let [arg] = c.args.as_slice() else { return None };
    if !arg.args.is_empty() || arg.target != c.target {
        return None;
    }
    c.target.strip_prefix('#')?.parse().ok()
}

fn max_label(ty: &Type) -> usize {
    let mut atoms = BTreeSet::new();
    ty.atoms(&mut atoms);
    atoms
        .iter()
        .filter_map(|a| a.strip_prefix('#')?.parse::<usize>().ok())
        .max()
        .unwrap_or(0)
}

/// `λx^{Lk+1}.t1 + ... + λx^{Lk+n}.tn` with labels fresh for every component.
pub fn mk_list(items: &[Term]) -> Result<Term, EncodingError> {
    if items.is_empty() {
        return Err(EncodingError::Shape("a list needs at least one element".into()));
    }
    let mut base = 0;
    for t in items {
        base = base.max(max_label(&typing::infer(t)?.ty));
    }
    let parts = items
        .iter()
        .enumerate()
        .map(|(i, t)| Term::lam_raw(Arc::from("x"), label(base + i + 1), t.shift(1, 0)))
        .collect();
    Ok(Term::sum_all(parts))
}

pub fn mk_pair(r: &Term, s: &Term) -> Result<Term, EncodingError> {
    mk_list(&[r.clone(), s.clone()])
}

/// Component `i` (0-based) of a labelled list: project on the conjuncts
/// carrying the `i`-th outermost label, then feed them the label witness.
pub fn mk_nth(p: &Term, i: usize) -> Result<Term, EncodingError> {
    let ty = typing::infer(p)?.canonical;
    // The outer label of a conjunct is its largest label argument: the
    // labels of a list are fresher than anything inside its components.
    let mut outer = Vec::new();
    for c in &ty.conjuncts {
        let l = c.args.iter().filter_map(label_index).max().ok_or_else(|| {
            EncodingError::Shape(format!("`{}` has a conjunct without a label: {c}", ty.to_type()))
        })?;
        outer.push(l);
    }
    let labels: BTreeSet<usize> = outer.iter().copied().collect();
    let chosen = *labels.iter().nth(i).ok_or_else(|| {
        EncodingError::Shape(format!("`{}` has {} components, asked for #{i}", ty.to_type(), labels.len()))
    })?;
    let parts = ty
        .conjuncts
        .iter()
        .zip(&outer)
        .filter(|(_, l)| **l == chosen)
        .map(|(c, _)| c.to_type())
        .collect();
    Ok(Term::app(Term::proj(Type::conj_all(parts), p.clone()), label_witness(chosen)))
}

pub fn mk_fst(p: &Term) -> Result<Term, EncodingError> {
    mk_nth(p, 0)
}

pub fn mk_snd(p: &Term) -> Result<Term, EncodingError> {
    mk_nth(p, 1)
}

/// `[t]^A = λz^A.t` with `z` not occurring in `t`.
pub fn canon(t: &Term, a: &Type) -> Term {
    Term::lam_raw(Arc::from("z"), a.clone(), t.shift(1, 0))
}

/// `{t}^{A -> B}`: `t` applied to an inhabitant of `A`. When `A` is
/// `C -> D` with `C ≡ D` the inhabitant is the closed identity; otherwise
/// a fresh free variable stands in.
pub fn cocanon(t: &Term, arrow: &Type) -> Result<Term, EncodingError> {
    let Type::Arrow(dom, _) = arrow else {
        return Err(EncodingError::Shape(format!("cocanon needs an arrow type, got `{arrow}`")));
    };
    if !typing::check(t, arrow)? {
        return Err(EncodingError::Mismatch {
            expected: arrow.clone(),
            found: typing::infer(t)?.ty,
        });
    }
    let taken: BTreeSet<Ident> = all_vars(t).into_iter().map(|(x, _)| x).collect();
    let y = fresh_name("y", &taken);
    let dummy = match &**dom {
        Type::Arrow(c, d) if type_equiv(c, d) => {
            Term::lam_raw(Arc::from("x"), (**c).clone(), Term::bound(0, (**c).clone()))
        }
        Type::Arrow(c, d) => Term::lam_raw(Arc::from("x"), (**c).clone(), Term::free_ident(y, (**d).clone())),
        other => Term::free_ident(y, other.clone()),
    };
    Ok(Term::app(t.clone(), dummy))
}

fn dummy_arrow() -> Type {
    let a = Type::atom(DUMMY);
    Type::arrow(a.clone(), a)
}

/// `TT = λx^B.λy^{(A⇒A)⇒B}.x` and `FF = λx^{(A⇒A)⇒B}.λy^B.{x}` where `A` is
/// the reserved dummy atom.
pub fn mk_bool(v: bool, b: &Type) -> Term {
    let wrapped = Type::arrow(dummy_arrow(), b.clone());
    if v {
        Term::lam(
            "x",
            b.clone(),
            Term::lam_raw(Arc::from("y"), wrapped, Term::bound(1, b.clone())),
        )
    } else {
        let x = Term::bound(1, wrapped.clone());
        let a = Type::atom(DUMMY);
        let id = Term::lam_raw(Arc::from("w"), a.clone(), Term::bound(0, a));
        Term::lam_raw(
            Arc::from("x"),
            wrapped,
            Term::lam_raw(Arc::from("y"), b.clone(), Term::app(x, id)),
        )
    }
}

/// `if c then r else s := c r [s]^{A⇒A}`.
pub fn mk_ite(c: &Term, r: &Term, s: &Term) -> Result<Term, EncodingError> {
    let (rt, st) = (typing::infer(r)?, typing::infer(s)?);
    if rt.canonical != st.canonical {
        return Err(EncodingError::Mismatch { expected: rt.ty, found: st.ty });
    }
    let want = Type::arrows(vec![rt.ty.clone(), Type::arrow(dummy_arrow(), rt.ty.clone())], rt.ty);
    if !typing::check(c, &want)? {
        return Err(EncodingError::Mismatch {
            expected: want,
            found: typing::infer(c)?.ty,
        });
    }
    Ok(Term::apps(c.clone(), [r.clone(), canon(s, &dummy_arrow())]))
}

/// `λx^A.λy^A.x` (or `.y`): booleans at `A => A => A`, which cannot tell
/// their arguments apart.
pub fn naive_bool(v: bool, a: &Type) -> Term {
    let body = Term::bound(if v { 1 } else { 0 }, a.clone());
    Term::lam_raw(
        Arc::from("x"),
        a.clone(),
        Term::lam_raw(Arc::from("y"), a.clone(), body),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;
    use crate::term_equiv::Calculus;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn nfs(term: &Term) -> Vec<Term> {
        Calculus::standard().normalize_all(term).unwrap()
    }

    #[test]
    fn pair_projections_are_deterministic() {
        let (r, s) = (t("r:A"), t("s:A"));
        let p = mk_pair(&r, &s).unwrap();
        assert!(type_equiv(
            &typing::infer(&p).unwrap().ty,
            &Type::conj(Type::arrow(label(1), Type::atom("A")), Type::arrow(label(2), Type::atom("A")))
        ));
        assert_eq!(nfs(&mk_fst(&p).unwrap()), vec![r]);
        assert_eq!(nfs(&mk_snd(&p).unwrap()), vec![s]);
    }

    #[test]
    fn list_slots() {
        let items = [t("a:A"), t("b:A"), t("c:A")];
        let l = mk_list(&items).unwrap();
        for (i, item) in items.iter().enumerate() {
            assert_eq!(nfs(&mk_nth(&l, i).unwrap()), vec![item.clone()]);
        }
        assert!(mk_nth(&l, 3).is_err());
    }

    #[test]
    fn nested_pairs_use_fresh_labels() {
        let inner = mk_pair(&t("a:A"), &t("b:A")).unwrap();
        let outer = mk_pair(&inner, &t("c:A")).unwrap();
        let first = mk_fst(&outer).unwrap();
        assert_eq!(nfs(&mk_snd(&first).unwrap()), vec![t("b:A")]);
        assert_eq!(nfs(&mk_snd(&outer).unwrap()), vec![t("c:A")]);
    }

    #[test]
    fn fst_needs_a_pair() {
        assert!(matches!(mk_fst(&t("x:A")), Err(EncodingError::Shape(_))));
    }

    #[test]
    fn canon_round_trip() {
        let x = t("x:B");
        assert_eq!(canon(&x, &Type::atom("A")), t(r"\z:A. x:B"));
        let back = cocanon(&canon(&x, &Type::atom("A")), &Type::arrow(Type::atom("A"), Type::atom("B"))).unwrap();
        assert_eq!(nfs(&back), vec![x.clone()]);
        let a_to_a = dummy_arrow();
        let back = cocanon(&canon(&x, &a_to_a), &Type::arrow(a_to_a, Type::atom("B"))).unwrap();
        assert!(back.is_closed() == x.is_closed());
        assert_eq!(nfs(&back), vec![x.clone()]);
        assert!(cocanon(&x, &Type::atom("B")).is_err());
    }

    #[test]
    fn ite_is_deterministic() {
        let b = Type::atom("B");
        let (r, s) = (t("r:B"), t("s:B"));
        let tt = mk_bool(true, &b);
        let ff = mk_bool(false, &b);
        assert_eq!(nfs(&mk_ite(&tt, &r, &s).unwrap()), vec![r.clone()]);
        assert_eq!(nfs(&mk_ite(&ff, &r, &s).unwrap()), vec![s.clone()]);
    }

    #[test]
    fn naive_booleans_give_both() {
        let a = Type::atom("A");
        let (r, s) = (t("r:A"), t("s:A"));
        let res = nfs(&Term::apps(naive_bool(true, &a), [r.clone(), s.clone()]));
        assert!(res.contains(&r) && res.contains(&s));
    }
}
