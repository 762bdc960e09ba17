//! Abstract syntax for types and Church-style terms.
//!
//! Terms are stored nameless: a bound occurrence carries the de Bruijn index
//! of its binder, a free occurrence carries its name. Binders keep the name
//! they were written with as a [`Hint`], which only the printer looks at, so
//! structural equality on [`Term`] is α-equivalence.

mod parse;
mod print;
mod subst;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::Arc;

pub use parse::{parse_program, parse_term, parse_type, ParseError, Program};
pub use print::fresh_name;
pub use subst::{all_vars, free_vars, is_functional, is_functional_in, subst_term, subst_type};

pub type Ident = Arc<str>;

/// Name of the placeholder used when a one-hole context is treated as a term.
pub(crate) const HOLE: &str = "#hole";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Type {
    Atom(Ident),
    Arrow(Arc<Type>, Arc<Type>),
    Conj(Arc<Type>, Arc<Type>),
}

impl Type {
    pub fn atom(name: &str) -> Type {
        Type::Atom(Arc::from(name))
    }

    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type::Arrow(Arc::new(dom), Arc::new(cod))
    }

    pub fn conj(left: Type, right: Type) -> Type {
        Type::Conj(Arc::new(left), Arc::new(right))
    }

    /// Right-nested conjunction of a non-empty list.
    pub fn conj_all(mut parts: Vec<Type>) -> Type {
        let mut acc = parts.pop().expect("conjunction of zero types");
        while let Some(p) = parts.pop() {
            acc = Type::conj(p, acc);
        }
        acc
    }

    /// `a1 -> a2 -> ... -> target`.
    pub fn arrows(args: Vec<Type>, target: Type) -> Type {
        args.into_iter()
            .rev()
            .fold(target, |acc, a| Type::arrow(a, acc))
    }

    /// Replaces every syntactic occurrence of `from` by `to`.
    pub fn replace(&self, from: &Type, to: &Type) -> Type {
        if self == from {
            return to.clone();
        }
        match self {
            Type::Atom(_) => self.clone(),
            Type::Arrow(d, c) => Type::arrow(d.replace(from, to), c.replace(from, to)),
            Type::Conj(l, r) => Type::conj(l.replace(from, to), r.replace(from, to)),
        }
    }

    pub fn atoms(&self, out: &mut BTreeSet<Ident>) {
        match self {
            Type::Atom(a) => {
                out.insert(a.clone());
            }
            Type::Arrow(l, r) | Type::Conj(l, r) => {
                l.atoms(out);
                r.atoms(out);
            }
        }
    }

    pub fn atom_count(&self) -> usize {
        match self {
            Type::Atom(_) => 1,
            Type::Arrow(l, r) | Type::Conj(l, r) => l.atom_count() + r.atom_count(),
        }
    }
}

/// Binder name kept for printing. Ignored by equality, hashing and ordering.
#[derive(Clone, Debug)]
pub struct Hint(pub Ident);

impl PartialEq for Hint {
    fn eq(&self, _: &Hint) -> bool {
        true
    }
}
impl Eq for Hint {}
impl Hash for Hint {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}
impl PartialOrd for Hint {
    fn partial_cmp(&self, other: &Hint) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Hint {
    fn cmp(&self, _: &Hint) -> Ordering {
        Ordering::Equal
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum TermKind {
    /// Free occurrence `x^A`.
    Free(Ident, Type),
    /// Bound occurrence: de Bruijn index and its own annotation.
    Bound(u32, Type),
    Lam(Hint, Type, Term),
    App(Term, Term),
    Sum(Term, Term),
    Proj(Type, Term),
}

struct Node {
    kind: TermKind,
    hash: u64,
    size: u32,
}

/// Immutable, cheaply clonable term. Equality is α-equivalence.
#[derive(Clone)]
pub struct Term(Arc<Node>);

impl Term {
    fn mk(kind: TermKind) -> Term {
        let mut h = DefaultHasher::new();
        kind.hash(&mut h);
        let size = match &kind {
            TermKind::Free(..) | TermKind::Bound(..) => 1,
            TermKind::Lam(_, _, b) | TermKind::Proj(_, b) => 1 + b.size(),
            TermKind::App(f, a) => 1 + f.size() + a.size(),
            TermKind::Sum(l, r) => 1 + l.size() + r.size(),
        };
        Term(Arc::new(Node {
            kind,
            hash: h.finish(),
            size,
        }))
    }

    pub fn free(name: &str, ty: Type) -> Term {
        Term::mk(TermKind::Free(Arc::from(name), ty))
    }

    pub fn free_ident(name: Ident, ty: Type) -> Term {
        Term::mk(TermKind::Free(name, ty))
    }

    pub fn bound(index: u32, ty: Type) -> Term {
        Term::mk(TermKind::Bound(index, ty))
    }

    /// Raw binder: `body` must already refer to the binder with index 0.
    pub fn lam_raw(hint: Ident, ty: Type, body: Term) -> Term {
        Term::mk(TermKind::Lam(Hint(hint), ty, body))
    }

    /// `λname^ty.body`, binding the free occurrences of `name` in `body`.
    pub fn lam(name: &str, ty: Type, body: Term) -> Term {
        let body = subst::close(&body, name, 0);
        Term::lam_raw(Arc::from(name), ty, body)
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::mk(TermKind::App(f, a))
    }

    /// Left-nested application `f a1 a2 ...`.
    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn sum(l: Term, r: Term) -> Term {
        Term::mk(TermKind::Sum(l, r))
    }

    /// Right-nested sum of a non-empty list.
    pub fn sum_all(mut parts: Vec<Term>) -> Term {
        let mut acc = parts.pop().expect("sum of zero terms");
        while let Some(p) = parts.pop() {
            acc = Term::sum(p, acc);
        }
        acc
    }

    pub fn proj(ty: Type, body: Term) -> Term {
        Term::mk(TermKind::Proj(ty, body))
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    /// Number of syntax nodes.
    pub fn size(&self) -> u32 {
        self.0.size
    }

    pub fn is_sum(&self) -> bool {
        matches!(self.kind(), TermKind::Sum(..))
    }

    /// Summands of the maximal sum spine rooted here (a non-sum is its own
    /// single summand).
    pub fn summands(&self) -> Vec<Term> {
        let mut out = Vec::new();
        fn go(t: &Term, out: &mut Vec<Term>) {
            match t.kind() {
                TermKind::Sum(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                _ => out.push(t.clone()),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn children(&self) -> Vec<&Term> {
        match self.kind() {
            TermKind::Free(..) | TermKind::Bound(..) => vec![],
            TermKind::Lam(_, _, b) | TermKind::Proj(_, b) => vec![b],
            TermKind::App(l, r) | TermKind::Sum(l, r) => vec![l, r],
        }
    }

    /// Rebuilds this node with child `i` replaced.
    pub fn with_child(&self, i: u8, child: Term) -> Term {
        match (self.kind(), i) {
            (TermKind::Lam(h, ty, _), 0) => Term::lam_raw(h.0.clone(), ty.clone(), child),
            (TermKind::Proj(ty, _), 0) => Term::proj(ty.clone(), child),
            (TermKind::App(_, a), 0) => Term::app(child, a.clone()),
            (TermKind::App(f, _), 1) => Term::app(f.clone(), child),
            (TermKind::Sum(_, r), 0) => Term::sum(child, r.clone()),
            (TermKind::Sum(l, _), 1) => Term::sum(l.clone(), child),
            _ => panic!("no child {i} in {self}"),
        }
    }

    pub fn at(&self, path: &Path) -> Option<&Term> {
        let mut cur = self;
        for &i in &path.0 {
            cur = *cur.children().get(i as usize)?;
        }
        Some(cur)
    }

    /// Replaces the subterm at `path`. Panics on an invalid path.
    pub fn replace_at(&self, path: &[u8], new: Term) -> Term {
        match path.split_first() {
            None => new,
            Some((&i, rest)) => {
                let child = self.children()[i as usize].replace_at(rest, new);
                self.with_child(i, child)
            }
        }
    }

    /// Pre-order list of `(path, binder depth, subterm)`.
    pub fn positions(&self) -> Vec<(Path, u32, Term)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        fn go(t: &Term, depth: u32, path: &mut Vec<u8>, out: &mut Vec<(Path, u32, Term)>) {
            out.push((Path(path.clone()), depth, t.clone()));
            let inner = match t.kind() {
                TermKind::Lam(..) => depth + 1,
                _ => depth,
            };
            for (i, c) in t.children().into_iter().enumerate() {
                path.push(i as u8);
                go(c, inner, path, out);
                path.pop();
            }
        }
        go(self, 0, &mut path, &mut out);
        out
    }

    /// Lowest de Bruijn index that escapes this term, if any.
    pub fn has_loose_bound(&self) -> bool {
        subst::max_loose(self, 0).is_some()
    }

    pub fn is_closed(&self) -> bool {
        !self.has_loose_bound() && free_vars(self).is_empty()
    }

    /// Maps every type annotation.
    pub fn map_types(&self, f: &mut impl FnMut(&Type) -> Type) -> Term {
        match self.kind() {
            TermKind::Free(x, ty) => Term::free_ident(x.clone(), f(ty)),
            TermKind::Bound(i, ty) => Term::bound(*i, f(ty)),
            TermKind::Lam(h, ty, b) => {
                let ty = f(ty);
                Term::lam_raw(h.0.clone(), ty, b.map_types(f))
            }
            TermKind::App(a, b) => Term::app(a.map_types(f), b.map_types(f)),
            TermKind::Sum(a, b) => Term::sum(a.map_types(f), b.map_types(f)),
            TermKind::Proj(ty, b) => {
                let ty = f(ty);
                Term::proj(ty, b.map_types(f))
            }
        }
    }

    /// Shifts loose bound indices `>= cutoff` by `delta`.
    pub fn shift(&self, delta: i64, cutoff: u32) -> Term {
        subst::shift(self, delta, cutoff)
    }

    /// Body of a binder instantiated with `arg` (β-contraction of `λ.body arg`).
    pub fn instantiate(body: &Term, arg: &Term) -> Term {
        subst::instantiate(body, arg)
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash
                && self.0.size == other.0.size
                && self.0.kind == other.0.kind)
    }
}
impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Term) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Term {
    fn cmp(&self, other: &Term) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.kind.cmp(&other.0.kind)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Child-index path from the root: `0` is the body of a binder or projection
/// and the left side of an application or sum, `1` the right side.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Path(pub Vec<u8>);

impl Path {
    pub fn root() -> Path {
        Path(Vec::new())
    }

    pub fn child(&self, i: u8) -> Path {
        let mut v = self.0.clone();
        v.push(i);
        Path(v)
    }

    pub fn join(&self, rest: &Path) -> Path {
        let mut v = self.0.clone();
        v.extend_from_slice(&rest.0);
        Path(v)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "/");
        }
        for i in &self.0 {
            write!(f, "/{i}")?;
        }
        Ok(())
    }
}

/// A term with one distinguished hole position.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Context {
    term: Term,
    hole: Path,
}

impl Context {
    /// Takes `term` with the subterm at `hole` removed. `None` if the path is
    /// not a position of `term`.
    pub fn new(term: Term, hole: Path) -> Option<Context> {
        term.at(&hole)?;
        Some(Context { term, hole })
    }

    pub fn hole(&self) -> &Path {
        &self.hole
    }

    pub fn plug(&self, t: Term) -> Term {
        self.term.replace_at(&self.hole.0, t)
    }

    /// The context as a term, with the hole replaced by an opaque variable of
    /// type `ty`.
    pub fn with_placeholder(&self, ty: Type) -> Term {
        self.plug(Term::free(HOLE, ty))
    }
}
