//! The term equivalence `≡` and its finite classes.
//!
//! Two engines live here. [`Calculus::equiv_step`] applies the nine rules
//! literally, one binary rewrite at one position, in both directions; it
//! works on any term and is what the property suites use to check that
//! single steps preserve types and measures.
//!
//! Class enumeration works on *prepared* terms instead: every annotation is
//! replaced by its canonical form (which is what `(subst)` can reach), and,
//! in standard mode, every sum spine is flattened, sorted and re-associated
//! to the right, so `(comm)` and `(asso)` are built into term identity. The
//! remaining rules are then applied to whole sum spines at once: a rule
//! whose left-hand side is `r + s` fires for every way of splitting the
//! spine into two parts, and a rule whose right-hand side is a sum merges
//! any two summands. A class is thus enumerated as a set of AC-classes,
//! which keeps it small.
//!
//! In deterministic mode there is no AC quotient and the engine uses the
//! literal rules without `(comm)` and `(asso)`.

use std::cell::RefCell;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::rc::Rc;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::{Path, Term, TermKind, Type, HOLE};
use crate::type_canon::{canonical_in, normal_type, CanonicalType, Mode};
use crate::typing::{type_of_in, TypeError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquivRule {
    Comm,
    Asso,
    DistIi,
    DistIe,
    DistEi,
    DistEe,
    Curry,
    Subst,
    Split,
}

impl EquivRule {
    pub const ALL: [EquivRule; 9] = [
        EquivRule::Comm,
        EquivRule::Asso,
        EquivRule::DistIi,
        EquivRule::DistIe,
        EquivRule::DistEi,
        EquivRule::DistEe,
        EquivRule::Curry,
        EquivRule::Subst,
        EquivRule::Split,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EquivRule::Comm => "comm",
            EquivRule::Asso => "asso",
            EquivRule::DistIi => "dist_ii",
            EquivRule::DistIe => "dist_ie",
            EquivRule::DistEi => "dist_ei",
            EquivRule::DistEe => "dist_ee",
            EquivRule::Curry => "curry",
            EquivRule::Subst => "subst",
            EquivRule::Split => "split",
        }
    }
}

impl fmt::Display for EquivRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    LR,
    RL,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::LR => Direction::RL,
            Direction::RL => Direction::LR,
        }
    }
}

/// One application of a rule of `≡` at `position` of the source term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivStep {
    pub rule: EquivRule,
    pub direction: Direction,
    pub position: Path,
    pub result: Term,
}

impl fmt::Display for EquivStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.direction {
            Direction::LR => "->",
            Direction::RL => "<-",
        };
        write!(f, "{}{dir} @ {} : {}", self.rule, self.position, self.result)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("equivalence class of {term} exceeds {cap} members")]
    ClassCap { cap: usize, term: String },
    #[error("fuel exhausted after {fuel} class expansions")]
    FuelExhausted { fuel: u64 },
    #[error("reduction cycle through {term}")]
    Cycle { term: String },
    #[error(transparent)]
    Type(#[from] TypeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Config {
    pub mode: Mode,
    /// Largest equivalence class enumerated before giving up.
    pub class_cap: usize,
    /// Number of distinct classes a normalisation may expand.
    pub fuel: u64,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            mode: Mode::Standard,
            class_cap: 50_000,
            fuel: 200_000,
        }
    }
}

impl Config {
    pub fn with_mode(mode: Mode) -> Config {
        Config {
            mode,
            ..Config::default()
        }
    }
}

/// A materialised class `{s | s ≡* r}`.
#[derive(Clone, Debug)]
pub struct EquivClass {
    /// Least member by size, then structure.
    pub representative: Term,
    pub members: Vec<Term>,
    /// Breadth-first spanning tree: for every member but the first, the
    /// member it was first reached from and the step taken.
    pub edges: Vec<(Term, EquivStep)>,
}

pub(crate) struct ClassData {
    pub rep: Term,
    pub members: Vec<Term>,
    pub parent: HashMap<Term, (Term, EquivStep)>,
    pub sum_member: Option<Term>,
}

/// The rewriting engine: configuration plus caches. Caches only ever map a
/// term to a value determined by the term, so sharing an engine between
/// computations changes nothing but speed.
pub struct Calculus {
    pub(crate) config: Config,
    types: RefCell<HashMap<Term, Option<CanonicalType>>>,
    ac_cache: RefCell<HashMap<Term, Term>>,
    pub(crate) classes: RefCell<HashMap<Term, Rc<ClassData>>>,
    /// Context-with-placeholder to "the hole can end up right under a π".
    pub(crate) hole_under_proj: RefCell<HashMap<Term, bool>>,
    pub(crate) successors: RefCell<HashMap<Term, Rc<Vec<crate::reduction::Successor>>>>,
}

impl Default for Calculus {
    fn default() -> Calculus {
        Calculus::new(Config::default())
    }
}

fn unordered_bipartitions(items: &[Term]) -> Vec<(Vec<Term>, Vec<Term>)> {
    let n = items.len();
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for mask in 0u64..(1 << (n - 1)) {
        let mut left = vec![items[0].clone()];
        let mut right = Vec::new();
        for (i, it) in items.iter().enumerate().skip(1) {
            if mask & (1 << (i - 1)) != 0 {
                left.push(it.clone());
            } else {
                right.push(it.clone());
            }
        }
        if !right.is_empty() {
            out.push((left, right));
        }
    }
    out
}

pub(crate) fn ordered_bipartitions(items: &[Term]) -> Vec<(Vec<Term>, Vec<Term>)> {
    let n = items.len();
    let mut out = Vec::new();
    for mask in 1u64..(1 << n) - 1 {
        let (mut l, mut r) = (Vec::new(), Vec::new());
        for (i, it) in items.iter().enumerate() {
            if mask & (1 << i) != 0 {
                l.push(it.clone());
            } else {
                r.push(it.clone());
            }
        }
        out.push((l, r));
    }
    out
}

/// Whether some projection has the placeholder as its immediate body.
fn hole_under_proj(t: &Term) -> bool {
    match t.kind() {
        TermKind::Proj(_, b) if matches!(b.kind(), TermKind::Free(x, _) if &**x == HOLE) => true,
        _ => t.children().into_iter().any(hole_under_proj),
    }
}

impl Calculus {
    pub fn new(config: Config) -> Calculus {
        Calculus {
            config,
            types: RefCell::default(),
            ac_cache: RefCell::default(),
            classes: RefCell::default(),
            hole_under_proj: RefCell::default(),
            successors: RefCell::default(),
        }
    }

    pub fn standard() -> Calculus {
        Calculus::new(Config::default())
    }

    pub fn deterministic() -> Calculus {
        Calculus::new(Config::with_mode(Mode::Deterministic))
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn mode(&self) -> Mode {
        self.config.mode
    }

    /// Structural type (no functionality checks), cached.
    pub fn type_of(&self, t: &Term) -> Option<CanonicalType> {
        type_of_in(self.mode(), t, &mut self.types.borrow_mut())
    }

    fn canon(&self, ty: &Type) -> CanonicalType {
        canonical_in(self.mode(), ty)
    }

    /// Canonical annotations and, in standard mode, sorted sum spines. All
    /// engine operations work on prepared terms.
    pub fn prepare(&self, t: &Term) -> Term {
        let mode = self.mode();
        let t = t.map_types(&mut |ty| normal_type(mode, ty));
        self.ac_normal(&t)
    }

    /// AC-normal form: sum spines flattened, sorted and right-associated.
    /// The identity in deterministic mode.
    pub fn ac_normal(&self, t: &Term) -> Term {
        if self.mode() == Mode::Deterministic {
            return t.clone();
        }
        if let Some(n) = self.ac_cache.borrow().get(t) {
            return n.clone();
        }
        let n = match t.kind() {
            TermKind::Free(..) | TermKind::Bound(..) => t.clone(),
            TermKind::Lam(h, ty, b) => {
                let nb = self.ac_normal(b);
                if nb == *b {
                    t.clone()
                } else {
                    Term::lam_raw(h.0.clone(), ty.clone(), nb)
                }
            }
            TermKind::Proj(ty, b) => {
                let nb = self.ac_normal(b);
                if nb == *b {
                    t.clone()
                } else {
                    Term::proj(ty.clone(), nb)
                }
            }
            TermKind::App(f, a) => {
                let (nf, na) = (self.ac_normal(f), self.ac_normal(a));
                if nf == *f && na == *a {
                    t.clone()
                } else {
                    Term::app(nf, na)
                }
            }
            TermKind::Sum(..) => {
                let mut parts: Vec<Term> = t.summands().iter().flat_map(|s| self.ac_normal(s).summands()).collect();
                parts.sort();
                Term::sum_all(parts)
            }
        };
        let mut cache = self.ac_cache.borrow_mut();
        cache.insert(t.clone(), n.clone());
        cache.insert(n.clone(), n.clone());
        n
    }

    fn sum_of(&self, parts: &[Term]) -> Term {
        Term::sum_all(parts.to_vec())
    }

    // ---------------------------------------------------------------
    // Literal rules

    /// All one-step `≡` successors of `t`, every rule, both directions,
    /// every position. In deterministic mode `(comm)` and `(asso)` are
    /// absent.
    pub fn equiv_step(&self, t: &Term) -> Vec<EquivStep> {
        let mut out = Vec::new();
        for (path, _, sub) in t.positions() {
            for (rule, direction, new) in self.literal_at(&sub, true) {
                out.push(EquivStep {
                    rule,
                    direction,
                    position: path.clone(),
                    result: t.replace_at(&path.0, new),
                });
            }
        }
        out
    }

    /// Local literal rewrites of `u` (as a redex at the root).
    fn literal_at(&self, u: &Term, with_ac: bool) -> Vec<(EquivRule, Direction, Term)> {
        use Direction::*;
        use EquivRule::*;
        let mode = self.mode();
        let ac = with_ac && mode == Mode::Standard;
        let mut out = Vec::new();
        match u.kind() {
            TermKind::Sum(l, r) => {
                if ac {
                    out.push((Comm, LR, Term::sum(r.clone(), l.clone())));
                    if let TermKind::Sum(a, b) = l.kind() {
                        out.push((Asso, LR, Term::sum(a.clone(), Term::sum(b.clone(), r.clone()))));
                    }
                    if let TermKind::Sum(b, c) = r.kind() {
                        out.push((Asso, RL, Term::sum(Term::sum(l.clone(), b.clone()), c.clone())));
                    }
                }
                if let Some(m) = self.merge_pair(l, r) {
                    out.push(m);
                }
            }
            TermKind::Lam(h, a, body) => {
                if let TermKind::Sum(r, s) = body.kind() {
                    out.push((
                        DistIi,
                        LR,
                        Term::sum(
                            Term::lam_raw(h.0.clone(), a.clone(), r.clone()),
                            Term::lam_raw(h.0.clone(), a.clone(), s.clone()),
                        ),
                    ));
                }
                if let TermKind::Proj(b, r) = body.kind() {
                    let ann = Type::arrow(a.clone(), b.clone());
                    out.push((DistEi, RL, Term::proj(normal_type(mode, &ann), Term::lam_raw(h.0.clone(), a.clone(), r.clone()))));
                }
            }
            TermKind::App(f, t) => {
                if let TermKind::Sum(r, s) = f.kind() {
                    out.push((DistIe, LR, Term::sum(Term::app(r.clone(), t.clone()), Term::app(s.clone(), t.clone()))));
                }
                if let TermKind::App(r, s) = f.kind() {
                    out.push((Curry, LR, Term::app(r.clone(), Term::sum(s.clone(), t.clone()))));
                }
                if let TermKind::Sum(s1, s2) = t.kind() {
                    out.push((Curry, RL, Term::app(Term::app(f.clone(), s1.clone()), s2.clone())));
                }
                if let TermKind::Proj(ty, r) = f.kind() {
                    if let Some(n) = self.dist_ee_lr(ty, r, t) {
                        out.push((DistEe, LR, n));
                    }
                }
            }
            TermKind::Proj(ty, body) => {
                if let TermKind::Lam(h, a, r) = body.kind() {
                    if let Some(b) = self.canon(ty).apply(&self.canon(a), mode) {
                        out.push((DistEi, LR, Term::lam_raw(h.0.clone(), a.clone(), Term::proj(b.to_type(), r.clone()))));
                    }
                }
                if let TermKind::App(r, s) = body.kind() {
                    if let Some(n) = self.dist_ee_rl(ty, r, s) {
                        out.push((DistEe, RL, n));
                    }
                }
                if let TermKind::Sum(r, s) = body.kind() {
                    for (a, c) in self.split_options(ty, r, s) {
                        out.push((Split, LR, Term::sum(Term::proj(a, r.clone()), Term::proj(c, s.clone()))));
                    }
                }
            }
            TermKind::Free(..) | TermKind::Bound(..) => {}
        }
        if with_ac {
            if let Some(ann) = head_annotation(u) {
                let canonical = normal_type(mode, &ann);
                if canonical != ann {
                    out.push((Subst, LR, crate::syntax::subst_type(u, &canonical, &ann)));
                }
            }
        }
        out
    }

    /// Right-to-left rules whose source is the sum of `l` and `r`.
    fn merge_pair(&self, l: &Term, r: &Term) -> Option<(EquivRule, Direction, Term)> {
        use Direction::RL;
        match (l.kind(), r.kind()) {
            (TermKind::Lam(h, a, b1), TermKind::Lam(_, a2, b2)) if self.canon(a) == self.canon(a2) => Some((
                EquivRule::DistIi,
                RL,
                Term::lam_raw(h.0.clone(), a.clone(), Term::sum(b1.clone(), b2.clone())),
            )),
            (TermKind::App(f1, t1), TermKind::App(f2, t2)) if t1 == t2 => Some((
                EquivRule::DistIe,
                RL,
                Term::app(Term::sum(f1.clone(), f2.clone()), t1.clone()),
            )),
            (TermKind::Proj(a, r1), TermKind::Proj(c, r2)) => {
                let ann = self.canon(&Type::conj(a.clone(), c.clone())).to_type();
                Some((EquivRule::Split, RL, Term::proj(ann, Term::sum(r1.clone(), r2.clone()))))
            }
            _ => None,
        }
    }

    /// `π_{A->B}(r) s  ≡  π_B(r s)` provided `r : A -> (B /\ C)`.
    fn dist_ee_lr(&self, ty: &Type, r: &Term, s: &Term) -> Option<Term> {
        let a = self.type_of(s)?;
        let b = self.canon(ty).apply(&a, self.mode())?;
        let rs = Term::app(r.clone(), s.clone());
        if !self.type_of(&rs)?.includes(&b) {
            return None;
        }
        Some(Term::proj(b.to_type(), rs))
    }

    /// `π_B(r s)  ≡  π_{A->B}(r) s` with `s : A`, provided `r : A -> (B /\ C)`.
    fn dist_ee_rl(&self, b: &Type, r: &Term, s: &Term) -> Option<Term> {
        let a = self.type_of(s)?;
        let ab = CanonicalType::arrow(&a, &self.canon(b), self.mode());
        if !self.type_of(r)?.includes(&ab) {
            return None;
        }
        Some(Term::app(Term::proj(ab.to_type(), r.clone()), s.clone()))
    }

    /// Splittings `A /\ C` of the annotation with `r : A (/\ B)` and
    /// `s : C (/\ D)`.
    fn split_options(&self, ty: &Type, r: &Term, s: &Term) -> Vec<(Type, Type)> {
        let (Some(tr), Some(ts)) = (self.type_of(r), self.type_of(s)) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for (a, c) in self.ordered_splits(&self.canon(ty)) {
            if tr.includes(&a) && ts.includes(&c) {
                let pair = (a.to_type(), c.to_type());
                if !out.contains(&pair) {
                    out.push(pair);
                }
            }
        }
        out
    }

    /// Binary splits with both orders of the two parts; in deterministic
    /// mode only the positional (prefix, suffix) splits.
    fn ordered_splits(&self, c: &CanonicalType) -> Vec<(CanonicalType, CanonicalType)> {
        let splits = c.binary_splits(self.mode());
        match self.mode() {
            Mode::Deterministic => splits,
            Mode::Standard => splits.into_iter().flat_map(|(a, b)| [(a.clone(), b.clone()), (b, a)]).collect(),
        }
    }

    // ---------------------------------------------------------------
    // Class steps on prepared terms

    /// One-step successors used for class enumeration, on a prepared term.
    /// Results are prepared.
    pub(crate) fn class_steps(&self, t: &Term) -> Vec<EquivStep> {
        let mut out = Vec::new();
        let mut seen: HashSet<Term> = HashSet::new();
        let mut push = |rule, direction, position: &Path, result: Term, out: &mut Vec<EquivStep>| {
            if result != *t && seen.insert(result.clone()) {
                out.push(EquivStep {
                    rule,
                    direction,
                    position: position.clone(),
                    result,
                });
            }
        };
        for (path, sub) in self.rule_positions(t) {
            let locals = match self.mode() {
                Mode::Deterministic => self.literal_at(&sub, false),
                Mode::Standard => self.ac_local(&sub),
            };
            for (rule, dir, new) in locals {
                let result = self.ac_normal(&t.replace_at(&path.0, new));
                push(rule, dir, &path, result, &mut out);
            }
        }
        out
    }

    /// Positions, skipping the inner nodes of sum spines in standard mode.
    fn rule_positions(&self, t: &Term) -> Vec<(Path, Term)> {
        let mut out = Vec::new();
        let skip_inner = self.mode() == Mode::Standard;
        fn go(t: &Term, path: &mut Vec<u8>, inner: bool, skip_inner: bool, out: &mut Vec<(Path, Term)>) {
            if !(inner && skip_inner) {
                out.push((Path(path.clone()), t.clone()));
            }
            let is_sum = t.is_sum();
            for (i, c) in t.children().into_iter().enumerate() {
                path.push(i as u8);
                go(c, path, is_sum && i == 1 && c.is_sum(), skip_inner, out);
                path.pop();
            }
        }
        go(t, &mut Vec::new(), false, skip_inner, &mut out);
        out
    }

    /// Rules applied to an AC-normal redex, whole sum spines at a time.
    fn ac_local(&self, u: &Term) -> Vec<(EquivRule, Direction, Term)> {
        use Direction::*;
        use EquivRule::*;
        let mode = self.mode();
        let mut out = Vec::new();
        match u.kind() {
            TermKind::Sum(..) => {
                let parts = u.summands();
                for i in 0..parts.len() {
                    for j in i + 1..parts.len() {
                        if let Some((rule, dir, merged)) = self.merge_pair(&parts[i], &parts[j]) {
                            let mut rest: Vec<Term> = parts
                                .iter()
                                .enumerate()
                                .filter(|(k, _)| *k != i && *k != j)
                                .map(|(_, p)| p.clone())
                                .collect();
                            rest.push(merged);
                            out.push((rule, dir, self.sum_of(&rest)));
                        }
                    }
                }
            }
            TermKind::Lam(h, a, body) => {
                if body.is_sum() {
                    for (p1, p2) in unordered_bipartitions(&body.summands()) {
                        out.push((
                            DistIi,
                            LR,
                            Term::sum(
                                Term::lam_raw(h.0.clone(), a.clone(), self.sum_of(&p1)),
                                Term::lam_raw(h.0.clone(), a.clone(), self.sum_of(&p2)),
                            ),
                        ));
                    }
                }
                if let TermKind::Proj(b, r) = body.kind() {
                    let ann = normal_type(mode, &Type::arrow(a.clone(), b.clone()));
                    out.push((DistEi, RL, Term::proj(ann, Term::lam_raw(h.0.clone(), a.clone(), r.clone()))));
                }
            }
            TermKind::App(f, t) => {
                if f.is_sum() {
                    for (p1, p2) in unordered_bipartitions(&f.summands()) {
                        out.push((
                            DistIe,
                            LR,
                            Term::sum(Term::app(self.sum_of(&p1), t.clone()), Term::app(self.sum_of(&p2), t.clone())),
                        ));
                    }
                }
                if let TermKind::App(r, s) = f.kind() {
                    out.push((Curry, LR, Term::app(r.clone(), Term::sum(s.clone(), t.clone()))));
                }
                if t.is_sum() {
                    for (p1, p2) in ordered_bipartitions(&t.summands()) {
                        out.push((Curry, RL, Term::app(Term::app(f.clone(), self.sum_of(&p1)), self.sum_of(&p2))));
                    }
                }
                if let TermKind::Proj(ty, r) = f.kind() {
                    if let Some(n) = self.dist_ee_lr(ty, r, t) {
                        out.push((DistEe, LR, n));
                    }
                }
            }
            TermKind::Proj(ty, body) => {
                if let TermKind::Lam(h, a, r) = body.kind() {
                    if let Some(b) = self.canon(ty).apply(&self.canon(a), mode) {
                        out.push((DistEi, LR, Term::lam_raw(h.0.clone(), a.clone(), Term::proj(b.to_type(), r.clone()))));
                    }
                }
                if let TermKind::App(r, s) = body.kind() {
                    if let Some(n) = self.dist_ee_rl(ty, r, s) {
                        out.push((DistEe, RL, n));
                    }
                }
                if body.is_sum() {
                    for (p1, p2) in unordered_bipartitions(&body.summands()) {
                        let (r, s) = (self.sum_of(&p1), self.sum_of(&p2));
                        for (a, c) in self.split_options(ty, &r, &s) {
                            out.push((Split, LR, Term::sum(Term::proj(a, r.clone()), Term::proj(c, s.clone()))));
                        }
                    }
                }
            }
            TermKind::Free(..) | TermKind::Bound(..) => {}
        }
        out
    }

    // ---------------------------------------------------------------
    // Classes

    /// Breadth-first closure from a prepared term. With `stop`, returns as
    /// soon as a member satisfies it (the partial result is then only good
    /// for that answer).
    fn explore(&self, start: &Term, stop: Option<&dyn Fn(&Term) -> bool>) -> Result<(ClassData, bool), EngineError> {
        let mut members = vec![start.clone()];
        let mut parent: HashMap<Term, (Term, EquivStep)> = HashMap::new();
        let mut seen: HashSet<Term> = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([start.clone()]);
        let mut found = stop.is_some_and(|f| f(start));
        while !found {
            let Some(cur) = queue.pop_front() else { break };
            for step in self.class_steps(&cur) {
                if seen.insert(step.result.clone()) {
                    if seen.len() > self.config.class_cap {
                        return Err(EngineError::ClassCap {
                            cap: self.config.class_cap,
                            term: start.to_string(),
                        });
                    }
                    let next = step.result.clone();
                    members.push(next.clone());
                    parent.insert(next.clone(), (cur.clone(), step));
                    if stop.is_some_and(|f| f(&next)) {
                        found = true;
                        break;
                    }
                    queue.push_back(next);
                }
            }
        }
        let rep = members
            .iter()
            .min_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)))
            .expect("non-empty class")
            .clone();
        let sum_member = members.iter().find(|m| m.is_sum()).cloned();
        Ok((
            ClassData {
                rep,
                members,
                parent,
                sum_member,
            },
            found,
        ))
    }

    /// The class of a prepared term, cached for all its members.
    pub(crate) fn class_of(&self, t: &Term) -> Result<Rc<ClassData>, EngineError> {
        if let Some(c) = self.classes.borrow().get(t) {
            return Ok(c.clone());
        }
        let (data, _) = self.explore(t, None)?;
        let data = Rc::new(data);
        let mut classes = self.classes.borrow_mut();
        for m in &data.members {
            classes.insert(m.clone(), data.clone());
        }
        Ok(data)
    }

    /// `{s | s ≡* t}`.
    pub fn enumerate_class(&self, t: &Term) -> Result<EquivClass, EngineError> {
        let t = self.prepare(t);
        let data = self.class_of(&t)?;
        let mut edges: Vec<(Term, EquivStep)> = data
            .members
            .iter()
            .filter_map(|m| data.parent.get(m).cloned())
            .collect();
        edges.sort_by_key(|(_, s)| data.members.iter().position(|m| *m == s.result));
        Ok(EquivClass {
            representative: data.rep.clone(),
            members: data.members.clone(),
            edges,
        })
    }

    /// Representative of the class of `t` (least member by size, then
    /// structure).
    pub fn representative(&self, t: &Term) -> Result<Term, EngineError> {
        Ok(self.class_of(&self.prepare(t))?.rep.clone())
    }

    pub fn equiv_star(&self, a: &Term, b: &Term) -> Result<bool, EngineError> {
        let (a, b) = (self.prepare(a), self.prepare(b));
        if a == b {
            return Ok(true);
        }
        let class = self.class_of(&a)?;
        Ok(class.members.contains(&b))
    }

    /// A decomposition `t ≡* t1 + t2`, if the class has a sum member.
    pub fn is_sum_modulo(&self, t: &Term) -> Result<Option<(Term, Term)>, EngineError> {
        let class = self.class_of(&self.prepare(t))?;
        Ok(class.sum_member.as_ref().map(|m| match m.kind() {
            TermKind::Sum(l, r) => (l.clone(), r.clone()),
            _ => unreachable!("sum member"),
        }))
    }

    /// Whether the context obtained by putting a placeholder of type `ty` at
    /// `path` in the prepared term `t` is equivalent to one where the hole
    /// sits immediately under a projection.
    pub(crate) fn context_under_proj(&self, t: &Term, path: &Path, ty: &Type) -> Result<bool, EngineError> {
        if let Some((&last, up)) = path.0.split_last() {
            let parent = t.at(&Path(up.to_vec())).expect("valid path");
            if last == 0 && matches!(parent.kind(), TermKind::Proj(..)) {
                return Ok(true);
            }
        }
        let ctx = self.ac_normal(&t.replace_at(&path.0, Term::free(HOLE, ty.clone())));
        if let Some(&b) = self.hole_under_proj.borrow().get(&ctx) {
            return Ok(b);
        }
        let (data, found) = self.explore(&ctx, Some(&hole_under_proj))?;
        let mut cache = self.hole_under_proj.borrow_mut();
        for m in data.members {
            cache.insert(m, found);
        }
        Ok(found)
    }

    /// A shortest sequence of class steps from `from` to `to` (both
    /// prepared and in the same class).
    pub(crate) fn equiv_path(&self, from: &Term, to: &Term) -> Result<Vec<EquivStep>, EngineError> {
        if from == to {
            return Ok(Vec::new());
        }
        let target = to.clone();
        let (data, found) = self.explore(from, Some(&move |m: &Term| *m == target))?;
        if !found {
            return Err(EngineError::Cycle {
                term: format!("{to} is not equivalent to {from}"),
            });
        }
        let mut steps = Vec::new();
        let mut cur = to.clone();
        while let Some((prev, step)) = data.parent.get(&cur) {
            steps.push(step.clone());
            cur = prev.clone();
        }
        steps.reverse();
        Ok(steps)
    }
}

/// The annotation carried by the head node of `u`, if any.
fn head_annotation(u: &Term) -> Option<Type> {
    match u.kind() {
        TermKind::Free(_, ty) | TermKind::Bound(_, ty) | TermKind::Lam(_, ty, _) | TermKind::Proj(ty, _) => Some(ty.clone()),
        TermKind::App(..) | TermKind::Sum(..) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn has(steps: &[EquivStep], rule: EquivRule, result: &str) -> bool {
        let want = t(result);
        steps.iter().any(|s| s.rule == rule && s.result == want)
    }

    #[test]
    fn literal_steps() {
        let c = Calculus::standard();
        assert!(has(&c.equiv_step(&t("x:A + y:B")), EquivRule::Comm, "y:B + x:A"));
        assert!(has(&c.equiv_step(&t("r:(A->B->C) s:A t:B")), EquivRule::Curry, "r:(A->B->C) (s:A + t:B)"));
        assert!(has(&c.equiv_step(&t(r"\x:A. x + x")), EquivRule::DistIi, r"(\x:A. x) + \x:A. x"));
        assert!(has(&c.equiv_step(&t("(r:A + s:B) + u:C")), EquivRule::Asso, "r:A + (s:B + u:C)"));
        let split = c.equiv_step(&t(r"pi[A/\C](r:A/\B + s:C/\D)"));
        assert!(has(&split, EquivRule::Split, "pi[A](r:A/\\B) + pi[C](s:C/\\D)"));
        let d = Calculus::deterministic();
        assert!(!d.equiv_step(&t("x:A + y:B")).iter().any(|s| s.rule == EquivRule::Comm));
    }

    #[test]
    fn subst_reaches_canonical_annotations() {
        let c = Calculus::standard();
        let steps = c.equiv_step(&t(r"x:B/\A"));
        assert!(has(&steps, EquivRule::Subst, r"x:A/\B"));
        assert!(c.equiv_step(&t(r"x:A/\B")).is_empty());
    }

    #[test]
    fn small_classes() {
        let c = Calculus::standard();
        assert_eq!(c.enumerate_class(&t("x:A")).unwrap().members.len(), 1);
        // Modulo AC the commuted sum is the same member.
        let cls = c.enumerate_class(&t("x:A + y:B")).unwrap();
        assert_eq!(cls.members.len(), 1);
        assert!(c.equiv_star(&t("x:A + y:B"), &t("y:B + x:A")).unwrap());
        let cls = c.enumerate_class(&t(r"\x:A. x + x")).unwrap();
        assert_eq!(cls.members.len(), 2);
        assert!(c.equiv_star(&t(r"\x:A. x + x"), &t(r"(\x:A. x) + \x:A. x")).unwrap());
        let d = Calculus::deterministic();
        assert_eq!(d.enumerate_class(&t("x:A + y:B")).unwrap().members.len(), 1);
        assert!(!d.equiv_star(&t("x:A + y:B"), &t("y:B + x:A")).unwrap());
    }

    #[test]
    fn equiv_star_examples() {
        let c = Calculus::standard();
        assert!(c.equiv_star(&t("(r:A + s:B) + u:C"), &t("r:A + (s:B + u:C)")).unwrap());
        assert!(!c.equiv_star(&t("x:A"), &t("y:A")).unwrap());
        assert!(c
            .equiv_star(&t(r"pi[A/\C](r:A/\B + s:C/\D)"), &t(r"pi[A](r:A/\B) + pi[C](s:C/\D)"))
            .unwrap());
        assert!(c
            .equiv_star(&t(r"pi[B->A]((\x:A/\B. x) s:A) t:B"), &t(r"pi[A]((\x:A/\B. x) (s:A + t:B))"))
            .unwrap());
    }

    #[test]
    fn sums_modulo() {
        let c = Calculus::standard();
        assert!(c.is_sum_modulo(&t(r"x:A/\B")).unwrap().is_none());
        assert!(c.is_sum_modulo(&t(r"\x:A. x + x")).unwrap().is_some());
        let (l, r) = c.is_sum_modulo(&t("r:A + s:B")).unwrap().unwrap();
        assert_eq!((l, r), (t("r:A"), t("s:B")));
    }

    #[test]
    fn spanning_tree_replays() {
        let c = Calculus::standard();
        let cls = c.enumerate_class(&t(r"\x:A. \y:B. x + y")).unwrap();
        assert_eq!(cls.edges.len(), cls.members.len() - 1);
        for (src, step) in &cls.edges {
            assert!(c.class_steps(src).contains(step));
        }
    }
}
