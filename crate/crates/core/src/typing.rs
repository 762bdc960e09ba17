//! Type assignment modulo type equivalence.
//!
//! Every subterm of a Church-style term carries enough annotations to be
//! typed on its own, so inference is a single bottom-up pass. Besides the
//! type, each judgement records the annotations of the free variables and of
//! the bound variables whose binders lie outside the subterm; merging these
//! maps is where the "variables are used functionally" preconditions are
//! checked.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::syntax::{Ident, Path, Term, TermKind, Type};
use crate::type_canon::{canonical_in, CanonicalType, Mode};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypingResult {
    /// A representative: the canonical form read back as a type.
    pub ty: Type,
    pub canonical: CanonicalType,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TypeErrorKind {
    /// A variable is used with two non-equivalent annotations.
    NonFunctionalVars,
    /// The head of an application has a conjunct that takes no argument.
    ArrowExpected,
    /// The argument's type is not accepted by every conjunct of the head.
    ArgMismatch,
    /// The projected type is not part of the body's type.
    ProjNotAvailable,
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TypeErrorKind::NonFunctionalVars => "non-functional variables",
            TypeErrorKind::ArrowExpected => "arrow expected",
            TypeErrorKind::ArgMismatch => "argument mismatch",
            TypeErrorKind::ProjNotAvailable => "projection not available",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("type error at {location}: {kind}: {detail}")]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub location: Path,
    pub detail: String,
}

#[derive(Clone)]
struct Judgement {
    ty: CanonicalType,
    free: BTreeMap<Ident, CanonicalType>,
    /// Loose de Bruijn index (relative to the subterm) to its annotation.
    loose: BTreeMap<u32, CanonicalType>,
}

struct Inferencer {
    mode: Mode,
    memo: HashMap<Term, Judgement>,
}

fn err(kind: TypeErrorKind, path: &[u8], detail: String) -> TypeError {
    TypeError {
        kind,
        location: Path(path.to_vec()),
        detail,
    }
}

/// Free-variable and bound-index assumptions.
type Contexts = (BTreeMap<Ident, CanonicalType>, BTreeMap<u32, CanonicalType>);

impl Inferencer {
    fn merge(&self, a: &Judgement, b: &Judgement, path: &[u8]) -> Result<Contexts, TypeError> {
        let mut free = a.free.clone();
        for (x, ty) in &b.free {
            match free.get(x) {
                Some(prev) if prev != ty => {
                    return Err(err(
                        TypeErrorKind::NonFunctionalVars,
                        path,
                        format!("`{x}` is used both as {prev} and as {ty}"),
                    ))
                }
                Some(_) => {}
                None => {
                    free.insert(x.clone(), ty.clone());
                }
            }
        }
        let mut loose = a.loose.clone();
        for (i, ty) in &b.loose {
            match loose.get(i) {
                Some(prev) if prev != ty => {
                    return Err(err(
                        TypeErrorKind::NonFunctionalVars,
                        path,
                        format!("a bound variable is used both as {prev} and as {ty}"),
                    ))
                }
                Some(_) => {}
                None => {
                    loose.insert(*i, ty.clone());
                }
            }
        }
        Ok((free, loose))
    }

    fn go(&mut self, t: &Term, path: &mut Vec<u8>) -> Result<Judgement, TypeError> {
        if let Some(j) = self.memo.get(t) {
            return Ok(j.clone());
        }
        let mode = self.mode;
        let j = match t.kind() {
            TermKind::Free(x, ty) => {
                let c = canonical_in(mode, ty);
                Judgement {
                    ty: c.clone(),
                    free: BTreeMap::from([(x.clone(), c)]),
                    loose: BTreeMap::new(),
                }
            }
            TermKind::Bound(i, ty) => {
                let c = canonical_in(mode, ty);
                Judgement {
                    ty: c.clone(),
                    free: BTreeMap::new(),
                    loose: BTreeMap::from([(*i, c)]),
                }
            }
            TermKind::Lam(h, ty, body) => {
                path.push(0);
                let b = self.go(body, path);
                path.pop();
                let b = b?;
                let dom = canonical_in(mode, ty);
                if let Some(used) = b.loose.get(&0) {
                    if *used != dom {
                        return Err(err(
                            TypeErrorKind::NonFunctionalVars,
                            path,
                            format!("`{}` is bound as {dom} but used as {used}", h.0),
                        ));
                    }
                }
                Judgement {
                    ty: CanonicalType::arrow(&dom, &b.ty, mode),
                    free: b.free,
                    loose: b.loose.into_iter().filter(|(i, _)| *i > 0).map(|(i, c)| (i - 1, c)).collect(),
                }
            }
            TermKind::App(f, a) => {
                path.push(0);
                let jf = self.go(f, path);
                path.pop();
                let jf = jf?;
                path.push(1);
                let ja = self.go(a, path);
                path.pop();
                let ja = ja?;
                let (free, loose) = self.merge(&jf, &ja, path)?;
                if let Some(c) = jf.ty.conjuncts.iter().find(|c| c.args.is_empty()) {
                    return Err(err(
                        TypeErrorKind::ArrowExpected,
                        path,
                        format!("the function has type {}, whose conjunct {c} takes no argument", jf.ty),
                    ));
                }
                let ty = jf.ty.apply(&ja.ty, mode).ok_or_else(|| {
                    err(
                        TypeErrorKind::ArgMismatch,
                        path,
                        format!("a function of type {} cannot take an argument of type {}", jf.ty, ja.ty),
                    )
                })?;
                Judgement { ty, free, loose }
            }
            TermKind::Sum(l, r) => {
                path.push(0);
                let jl = self.go(l, path);
                path.pop();
                let jl = jl?;
                path.push(1);
                let jr = self.go(r, path);
                path.pop();
                let jr = jr?;
                let (free, loose) = self.merge(&jl, &jr, path)?;
                Judgement {
                    ty: jl.ty.conj(&jr.ty, mode),
                    free,
                    loose,
                }
            }
            TermKind::Proj(ann, body) => {
                path.push(0);
                let jb = self.go(body, path);
                path.pop();
                let jb = jb?;
                let want = canonical_in(mode, ann);
                if !projectable(mode, &jb.ty, &want) {
                    return Err(err(
                        TypeErrorKind::ProjNotAvailable,
                        path,
                        format!("cannot project {want} out of {}", jb.ty),
                    ));
                }
                Judgement {
                    ty: want,
                    free: jb.free,
                    loose: jb.loose,
                }
            }
        };
        self.memo.insert(t.clone(), j.clone());
        Ok(j)
    }
}

/// Whether `pi[want]` applies to a term of type `have`: conjunct multiset
/// inclusion (the order of conjuncts plays no role even in deterministic
/// mode, where it only matters for `+`).
fn projectable(_mode: Mode, have: &CanonicalType, want: &CanonicalType) -> bool {
    have.includes(want)
}

pub fn infer(t: &Term) -> Result<TypingResult, TypeError> {
    infer_in(Mode::Standard, t)
}

pub fn infer_in(mode: Mode, t: &Term) -> Result<TypingResult, TypeError> {
    let mut inf = Inferencer {
        mode,
        memo: HashMap::new(),
    };
    let j = inf.go(t, &mut Vec::new())?;
    Ok(TypingResult {
        ty: j.ty.to_type(),
        canonical: j.ty,
    })
}

/// Whether `t` has a type equivalent to `a`.
pub fn check(t: &Term, a: &Type) -> Result<bool, TypeError> {
    check_in(Mode::Standard, t, a)
}

pub fn check_in(mode: Mode, t: &Term, a: &Type) -> Result<bool, TypeError> {
    Ok(infer_in(mode, t)?.canonical == canonical_in(mode, a))
}

/// Structural type of a subterm, without the functionality checks. Used by
/// the rewriting engine on subterms of terms already known to be typable.
pub fn type_of_in(mode: Mode, t: &Term, memo: &mut HashMap<Term, Option<CanonicalType>>) -> Option<CanonicalType> {
    if let Some(c) = memo.get(t) {
        return c.clone();
    }
    let c = match t.kind() {
        TermKind::Free(_, ty) | TermKind::Bound(_, ty) => Some(canonical_in(mode, ty)),
        TermKind::Lam(_, ty, body) => {
            let b = type_of_in(mode, body, memo)?;
            Some(CanonicalType::arrow(&canonical_in(mode, ty), &b, mode))
        }
        TermKind::App(f, a) => {
            let f = type_of_in(mode, f, memo)?;
            let a = type_of_in(mode, a, memo)?;
            if f.conjuncts.iter().any(|c| c.args.is_empty()) {
                None
            } else {
                f.apply(&a, mode)
            }
        }
        TermKind::Sum(l, r) => {
            let l = type_of_in(mode, l, memo)?;
            let r = type_of_in(mode, r, memo)?;
            Some(l.conj(&r, mode))
        }
        TermKind::Proj(ann, body) => {
            let b = type_of_in(mode, body, memo)?;
            let want = canonical_in(mode, ann);
            projectable(mode, &b, &want).then_some(want)
        }
    };
    memo.insert(t.clone(), c.clone());
    c
}

/// The generation lemma for the head constructor of a typable term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generation {
    /// `x^A : B` with `A ≡ B`.
    Var { ann: CanonicalType },
    /// `λx^A.r : B` with `B ≡ A -> C` and `r : C`.
    Lam { binder: CanonicalType, body: CanonicalType },
    /// `r s : B` with `r : A -> B` and `s : A`.
    App { fun: CanonicalType, arg: CanonicalType, result: CanonicalType },
    /// `r + s : A` with `A ≡ B /\ C`, `r : B`, `s : C`.
    Sum { left: CanonicalType, right: CanonicalType },
    /// `pi[A](r) : B` with `A ≡ B` and either `r : B` or `r : B /\ C`.
    Proj { ann: CanonicalType, body: CanonicalType, rest: Option<CanonicalType> },
}

pub fn invert(t: &Term) -> Result<Generation, TypeError> {
    invert_in(Mode::Standard, t)
}

pub fn invert_in(mode: Mode, t: &Term) -> Result<Generation, TypeError> {
    infer_in(mode, t)?;
    let ty = |s: &Term| infer_in(mode, s).map(|r| r.canonical);
    Ok(match t.kind() {
        TermKind::Free(_, a) | TermKind::Bound(_, a) => Generation::Var {
            ann: canonical_in(mode, a),
        },
        TermKind::Lam(_, a, body) => Generation::Lam {
            binder: canonical_in(mode, a),
            body: ty(body)?,
        },
        TermKind::App(f, a) => Generation::App {
            fun: ty(f)?,
            arg: ty(a)?,
            result: ty(t)?,
        },
        TermKind::Sum(l, r) => Generation::Sum {
            left: ty(l)?,
            right: ty(r)?,
        },
        TermKind::Proj(a, body) => {
            let ann = canonical_in(mode, a);
            let body = ty(body)?;
            let rest = body.minus(&ann).filter(|r| !r.is_empty()).map(|conjuncts| CanonicalType { conjuncts });
            Generation::Proj { ann, body, rest }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, parse_type};
    use crate::type_canon::{order_canonical, type_equiv};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn ty(s: &str) -> Type {
        parse_type(s).unwrap()
    }

    #[test]
    fn first_example_types_to_a() {
        let r = infer(&t(r"pi[B->A]((\x:A/\B. x) s:A) t:B")).unwrap();
        assert!(type_equiv(&r.ty, &ty("A")));
    }

    #[test]
    fn pairing_function() {
        let r = infer(&t(r"\x:A. \y:B. x + y")).unwrap();
        assert!(type_equiv(&r.ty, &ty(r"A->B->(A/\B)")));
        assert!(type_equiv(&r.ty, &ty(r"(A->B->A)/\(A->B->B)")));
    }

    #[test]
    fn booleans_sum() {
        let src = r"(\x:A. \y:B. x) + (\x:A. \y:B. y) + (\x:A. \y:B. x + y)";
        let r = infer(&t(src)).unwrap();
        let want = ty(r"((A->B->A)/\(A->B->B))/\((A->B->A)/\(A->B->B))");
        assert_eq!(r.canonical, order_canonical(&want));
    }

    #[test]
    fn check_examples() {
        assert!(check(&t(r"\x:A. x"), &ty("A->A")).unwrap());
        assert!(check(&t(r"\x:A/\B. x"), &ty(r"A->B->(A/\B)")).unwrap());
        assert!(check(&t("x:A + y:B"), &ty(r"B/\A")).unwrap());
        assert!(!check(&t("x:A + y:B"), &ty("A")).unwrap());
    }

    #[test]
    fn errors() {
        let e = infer(&t("x:A y:A")).unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::ArrowExpected);
        let e = infer(&t("f:(A->B) y:B")).unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::ArgMismatch);
        let e = infer(&t("pi[B](x:A)")).unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::ProjNotAvailable);
        let e = infer(&t("x:A + x:B")).unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::NonFunctionalVars);
        let e = infer(&t(r"\x:A. x:B")).unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::NonFunctionalVars);
        let e = infer(&t(r"\f:A->B. f (pi[C](y:A))")).unwrap_err();
        assert_eq!(e.location.to_string(), "/0/1");
    }

    #[test]
    fn application_modulo_currying() {
        // Arguments may be supplied in any order, one by one or grouped.
        let f = r"f:(A->B->C)";
        assert!(check(&t(&format!("{f} b:B a:A")), &ty("C")).unwrap());
        assert!(check(&t(&format!("{f} (a:A + b:B)")), &ty("C")).unwrap());
        assert!(check(&t(&format!("{f} b:B")), &ty("A->C")).unwrap());
        assert!(infer(&t(&format!("{f} c:C"))).is_err());
        assert!(infer_in(Mode::Deterministic, &t(&format!("{f} b:B"))).is_err());
    }

    #[test]
    fn equivalent_annotations_are_functional() {
        assert!(infer(&t(r"x:A/\B + x:B/\A")).is_ok());
        assert!(infer_in(Mode::Deterministic, &t(r"x:A/\B + x:B/\A")).is_err());
    }

    #[test]
    fn generation_lemmas() {
        match invert(&t(r"\x:A. y:B")).unwrap() {
            Generation::Lam { binder, body } => {
                assert_eq!(binder, order_canonical(&ty("A")));
                assert_eq!(body, order_canonical(&ty("B")));
            }
            g => panic!("{g:?}"),
        }
        match invert(&t("x:A + y:B")).unwrap() {
            Generation::Sum { left, right } => {
                assert_eq!(left.conj(&right, Mode::Standard), order_canonical(&ty(r"A/\B")));
            }
            g => panic!("{g:?}"),
        }
        match invert(&t(r"pi[A](x:A/\C)")).unwrap() {
            Generation::Proj { ann, rest, .. } => {
                assert_eq!(ann, order_canonical(&ty("A")));
                assert_eq!(rest, Some(order_canonical(&ty("C"))));
            }
            g => panic!("{g:?}"),
        }
        assert!(matches!(invert(&t(r"pi[A](x:A)")).unwrap(), Generation::Proj { rest: None, .. }));
    }
}
