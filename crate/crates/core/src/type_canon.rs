//! Canonical forms of types and the decision procedure for type equivalence.
//!
//! A type is decomposed into a conjunction of conjunction-free types, each of
//! which is a list of arguments ending in an atom. In [`Mode::Standard`] the
//! conjuncts, and the arguments of every arrow, are kept sorted in
//! quasi-lexicographic order of their serialization (length first, then
//! bytes), which makes equality of ordered canonical forms coincide with the
//! congruence generated by commutativity, associativity, distributivity and
//! currying. [`Mode::Deterministic`] drops commutativity and associativity
//! of conjunction: the lists keep their order of appearance.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::{Ident, Type};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[default]
    Standard,
    /// No `(comm)`/`(asso)`: sums and conjunctions are positional.
    Deterministic,
}

/// A conjunction-free type `S1 -> ... -> Sm -> atom`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ConjFree {
    pub args: Vec<ConjFree>,
    pub target: Ident,
}

impl ConjFree {
    pub fn atom(name: Ident) -> ConjFree {
        ConjFree {
            args: Vec::new(),
            target: name,
        }
    }

    /// Token string used by the quasi-lexicographic order: atoms by name,
    /// an arrow `d -> c` as `(d>c)`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        self.write_ser(&self.args, &mut out);
        out
    }

    fn write_ser(&self, args: &[ConjFree], out: &mut String) {
        match args.split_first() {
            None => out.push_str(&self.target),
            Some((d, rest)) => {
                out.push('(');
                d.write_ser(&d.args, out);
                out.push('>');
                self.write_ser(rest, out);
                out.push(')');
            }
        }
    }

    pub fn to_type(&self) -> Type {
        Type::arrows(
            self.args.iter().map(ConjFree::to_type).collect(),
            Type::Atom(self.target.clone()),
        )
    }

    fn atom_count(&self) -> usize {
        1 + self.args.iter().map(ConjFree::atom_count).sum::<usize>()
    }
}

impl fmt::Display for ConjFree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_type())
    }
}

/// Quasi-lexicographic comparison of serializations.
pub fn quasi_lex(a: &ConjFree, b: &ConjFree) -> Ordering {
    let (sa, sb) = (a.serialize(), b.serialize());
    sa.len().cmp(&sb.len()).then_with(|| sa.as_bytes().cmp(sb.as_bytes()))
}

fn sort_quasi_lex(items: &mut [ConjFree]) {
    let mut keyed: Vec<(String, ConjFree)> = items.iter().map(|c| (c.serialize(), c.clone())).collect();
    keyed.sort_by(|(a, _), (b, _)| a.len().cmp(&b.len()).then_with(|| a.as_bytes().cmp(b.as_bytes())));
    for (slot, (_, c)) in items.iter_mut().zip(keyed) {
        *slot = c;
    }
}

/// Non-empty conjunction of conjunction-free types.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CanonicalType {
    pub conjuncts: Vec<ConjFree>,
}

impl CanonicalType {
    pub fn len(&self) -> usize {
        self.conjuncts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conjuncts.is_empty()
    }

    /// Right-associated conjunction of the conjuncts.
    pub fn to_type(&self) -> Type {
        Type::conj_all(self.conjuncts.iter().map(ConjFree::to_type).collect())
    }

    pub fn atom_count(&self) -> usize {
        self.conjuncts.iter().map(ConjFree::atom_count).sum()
    }

    fn from_conjuncts(mode: Mode, mut conjuncts: Vec<ConjFree>) -> CanonicalType {
        debug_assert!(!conjuncts.is_empty());
        if mode == Mode::Standard {
            sort_quasi_lex(&mut conjuncts);
        }
        CanonicalType { conjuncts }
    }

    /// `self /\ other`.
    pub fn conj(&self, other: &CanonicalType, mode: Mode) -> CanonicalType {
        let mut cs = self.conjuncts.clone();
        cs.extend(other.conjuncts.iter().cloned());
        CanonicalType::from_conjuncts(mode, cs)
    }

    /// `dom -> cod`: every conjunct of `cod` gets all conjuncts of `dom` as
    /// leading arguments.
    pub fn arrow(dom: &CanonicalType, cod: &CanonicalType, mode: Mode) -> CanonicalType {
        let cs = cod
            .conjuncts
            .iter()
            .map(|c| {
                let mut args = dom.conjuncts.clone();
                args.extend(c.args.iter().cloned());
                if mode == Mode::Standard {
                    sort_quasi_lex(&mut args);
                }
                ConjFree {
                    args,
                    target: c.target.clone(),
                }
            })
            .collect();
        CanonicalType::from_conjuncts(mode, cs)
    }

    /// Result type of applying a function of this type to an argument of
    /// type `arg`: every conjunct must take exactly the conjuncts of `arg`
    /// (as a sub-multiset of its arguments in standard mode, as a prefix in
    /// deterministic mode), and the rest of its arguments remain.
    pub fn apply(&self, arg: &CanonicalType, mode: Mode) -> Option<CanonicalType> {
        let mut out = Vec::with_capacity(self.conjuncts.len());
        for c in &self.conjuncts {
            let rest = match mode {
                Mode::Standard => multiset_minus(&c.args, &arg.conjuncts)?,
                Mode::Deterministic => c.args.strip_prefix(arg.conjuncts.as_slice())?.to_vec(),
            };
            out.push(ConjFree {
                args: rest,
                target: c.target.clone(),
            });
        }
        Some(CanonicalType::from_conjuncts(mode, out))
    }

    /// Multiset inclusion of conjuncts (the condition for `pi[other]` to apply).
    pub fn includes(&self, other: &CanonicalType) -> bool {
        multiset_minus(&self.conjuncts, &other.conjuncts).is_some()
    }

    pub fn strictly_includes(&self, other: &CanonicalType) -> bool {
        self.len() > other.len() && self.includes(other)
    }

    /// Conjuncts of `self` not consumed by `other`, if `other` is included.
    pub fn minus(&self, other: &CanonicalType) -> Option<Vec<ConjFree>> {
        multiset_minus(&self.conjuncts, &other.conjuncts)
    }

    /// All ways of splitting the conjuncts into two non-empty parts. In
    /// standard mode these are the unordered multiset partitions; in
    /// deterministic mode the prefix/suffix splits.
    pub fn binary_splits(&self, mode: Mode) -> Vec<(CanonicalType, CanonicalType)> {
        let n = self.conjuncts.len();
        let mut out: Vec<(CanonicalType, CanonicalType)> = Vec::new();
        match mode {
            Mode::Deterministic => {
                for k in 1..n {
                    out.push((
                        CanonicalType::from_conjuncts(mode, self.conjuncts[..k].to_vec()),
                        CanonicalType::from_conjuncts(mode, self.conjuncts[k..].to_vec()),
                    ));
                }
            }
            Mode::Standard => {
                if n < 2 {
                    return out;
                }
                // The first conjunct always goes left, so each unordered
                // partition is produced from exactly one mask (up to
                // duplicate conjuncts, removed below).
                for mask in 0u64..(1 << (n - 1)) {
                    let mut left = vec![self.conjuncts[0].clone()];
                    let mut right = Vec::new();
                    for i in 1..n {
                        if mask & (1 << (i - 1)) != 0 {
                            left.push(self.conjuncts[i].clone());
                        } else {
                            right.push(self.conjuncts[i].clone());
                        }
                    }
                    if right.is_empty() {
                        continue;
                    }
                    let pair = (
                        CanonicalType::from_conjuncts(mode, left),
                        CanonicalType::from_conjuncts(mode, right),
                    );
                    let swapped = (pair.1.clone(), pair.0.clone());
                    if !out.contains(&pair) && !out.contains(&swapped) {
                        out.push(pair);
                    }
                }
            }
        }
        out
    }

    /// All sub-multisets (non-empty), each as a canonical type.
    pub fn sub_multisets(&self, mode: Mode) -> Vec<CanonicalType> {
        let n = self.conjuncts.len();
        let mut out: Vec<CanonicalType> = Vec::new();
        for mask in 1u64..(1 << n) {
            let cs: Vec<ConjFree> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| self.conjuncts[i].clone())
                .collect();
            let c = CanonicalType::from_conjuncts(mode, cs);
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }
}

impl fmt::Display for CanonicalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_type())
    }
}

fn multiset_minus(items: &[ConjFree], remove: &[ConjFree]) -> Option<Vec<ConjFree>> {
    let mut rest: Vec<ConjFree> = items.to_vec();
    for r in remove {
        let i = rest.iter().position(|c| c == r)?;
        rest.remove(i);
    }
    Some(rest)
}

fn canon_with(a: &Type, mode: Mode, ordered: bool) -> CanonicalType {
    let m = if ordered { Mode::Standard } else { Mode::Deterministic };
    let _ = mode;
    match a {
        Type::Atom(x) => CanonicalType {
            conjuncts: vec![ConjFree::atom(x.clone())],
        },
        Type::Conj(l, r) => canon_with(l, mode, ordered).conj(&canon_with(r, mode, ordered), m),
        Type::Arrow(d, c) => CanonicalType::arrow(&canon_with(d, mode, ordered), &canon_with(c, mode, ordered), m),
    }
}

/// `⟨A⟩`: conjuncts and arguments in order of appearance.
pub fn canonicalize(a: &Type) -> CanonicalType {
    canon_with(a, Mode::Deterministic, false)
}

/// `⟨A⟩ₒ`: conjuncts and arrow arguments sorted, computed bottom-up.
pub fn order_canonical(a: &Type) -> CanonicalType {
    canon_with(a, Mode::Standard, true)
}

/// The canonical form that decides equivalence in `mode`.
pub fn canonical_in(mode: Mode, a: &Type) -> CanonicalType {
    match mode {
        Mode::Standard => order_canonical(a),
        Mode::Deterministic => canonicalize(a),
    }
}

pub fn type_equiv(a: &Type, b: &Type) -> bool {
    type_equiv_in(Mode::Standard, a, b)
}

pub fn type_equiv_in(mode: Mode, a: &Type, b: &Type) -> bool {
    a == b || canonical_in(mode, a) == canonical_in(mode, b)
}

/// The ordered-canonical conjuncts of `a`, with multiplicity.
pub fn conjunct_multiset(a: &Type) -> Vec<ConjFree> {
    order_canonical(a).conjuncts
}

/// The annotation-canonical spelling of `a`: its canonical form read back
/// as a right-associated type.
pub fn normal_type(mode: Mode, a: &Type) -> Type {
    canonical_in(mode, a).to_type()
}
