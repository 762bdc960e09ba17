//! Reduction `→` and reduction modulo equivalence `⇝`.
//!
//! `r ⇝ s` when `r ≡* r' → s' ≡* s`. Since classes are finite, `⇝` is a
//! finitely branching relation on classes: [`Calculus::red_modulo`] returns
//! one representative per successor class. Normal forms, longest paths and
//! random walks are computed over classes with memoisation keyed by the
//! class representative.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::syntax::{Path, Term, TermKind};
use crate::term_equiv::{Calculus, EngineError, EquivStep};
use crate::type_canon::Mode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RedRule {
    Beta,
    PiN,
    Pi1,
    Delta,
}

impl RedRule {
    pub fn name(self) -> &'static str {
        match self {
            RedRule::Beta => "beta",
            RedRule::PiN => "pi_n",
            RedRule::Pi1 => "pi_1",
            RedRule::Delta => "delta",
        }
    }
}

impl fmt::Display for RedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One `→` step at `position`, optionally preceded by the `≡` steps that
/// expose the redex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedStep {
    pub rule: RedRule,
    pub position: Path,
    pub pre_equiv: Option<Vec<EquivStep>>,
    pub result: Term,
}

/// A successor class of a term under `⇝`.
#[derive(Clone, Debug)]
pub struct Successor {
    pub representative: Term,
    /// Every rule by which the class is reached.
    pub rules: BTreeSet<RedRule>,
    /// A member of the source class and the step from it.
    pub witness: (Term, RedStep),
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub start: Term,
    pub steps: Vec<RedStep>,
    pub end: Term,
}

#[derive(Serialize)]
struct JsonEquiv {
    rule: &'static str,
    direction: crate::term_equiv::Direction,
    position: String,
    term: String,
}

#[derive(Serialize)]
struct JsonStep {
    rule: &'static str,
    position: String,
    term: String,
    pre_equiv: Vec<JsonEquiv>,
}

#[derive(Serialize)]
struct JsonTrace {
    start: String,
    steps: Vec<JsonStep>,
    end: String,
}

impl Trace {
    /// `RULE @ PATH : TERM`, one line per step; the `≡` steps leading to a
    /// redex are listed before it, indented.
    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for step in &self.steps {
            for e in step.pre_equiv.iter().flatten() {
                out.push(format!("  {} @ {} : {}", e.rule, e.position, e.result));
            }
            out.push(format!("{} @ {} : {}", step.rule, step.position, step.result));
        }
        out
    }

    /// Stable structured dump: `{start, steps: [{rule, position, term,
    /// pre_equiv: [{rule, direction, position, term}]}], end}`.
    pub fn to_json(&self) -> serde_json::Value {
        let steps = self
            .steps
            .iter()
            .map(|s| JsonStep {
                rule: s.rule.name(),
                position: s.position.to_string(),
                term: s.result.to_string(),
                pre_equiv: s
                    .pre_equiv
                    .iter()
                    .flatten()
                    .map(|e| JsonEquiv {
                        rule: e.rule.name(),
                        direction: e.direction,
                        position: e.position.to_string(),
                        term: e.result.to_string(),
                    })
                    .collect(),
            })
            .collect();
        serde_json::to_value(JsonTrace {
            start: self.start.to_string(),
            steps,
            end: self.end.to_string(),
        })
        .expect("trace serialises")
    }
}

/// Longest random walk attempted, whatever the fuel.
const MAX_WALK: u64 = 10_000;

fn proper_subsets(items: &[Term]) -> Vec<Vec<Term>> {
    let n = items.len();
    (1u64..(1 << n) - 1)
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).map(|i| items[i].clone()).collect())
        .collect()
}

type Successors = Rc<Vec<Successor>>;

struct Search<'a> {
    calc: &'a Calculus,
    expansions: u64,
    on_stack: HashSet<Term>,
    longest: HashMap<Term, u64>,
}

impl Search<'_> {
    fn successors(&mut self, rep: &Term) -> Result<Rc<Vec<Successor>>, EngineError> {
        if !self.calc.successors.borrow().contains_key(rep) {
            self.expansions += 1;
            if self.expansions > self.calc.config.fuel {
                return Err(EngineError::FuelExhausted {
                    fuel: self.calc.config.fuel,
                });
            }
        }
        self.calc.red_modulo_prepared(rep)
    }

    /// Classes reachable from `rep` (including it), in breadth-first order.
    /// Works on cyclic graphs.
    fn reachable(&mut self, rep: &Term) -> Result<Vec<(Term, Successors)>, EngineError> {
        let mut seen = HashSet::from([rep.clone()]);
        let mut queue = std::collections::VecDeque::from([rep.clone()]);
        let mut out = Vec::new();
        while let Some(cur) = queue.pop_front() {
            let succs = self.successors(&cur)?;
            for s in succs.iter() {
                if seen.insert(s.representative.clone()) {
                    queue.push_back(s.representative.clone());
                }
            }
            out.push((cur, succs));
        }
        Ok(out)
    }

    /// Longest path; a cycle means some `⇝` sequence is infinite.
    fn longest(&mut self, rep: &Term) -> Result<u64, EngineError> {
        if let Some(&n) = self.longest.get(rep) {
            return Ok(n);
        }
        if !self.on_stack.insert(rep.clone()) {
            return Err(EngineError::Cycle { term: rep.to_string() });
        }
        let succs = self.successors(rep)?;
        let mut best = 0;
        for s in succs.iter() {
            best = best.max(1 + self.longest(&s.representative)?);
        }
        self.on_stack.remove(rep);
        self.longest.insert(rep.clone(), best);
        Ok(best)
    }
}

impl Calculus {
    /// All `→` steps of `t` itself, without equivalence moves first.
    pub fn direct_step(&self, t: &Term) -> Result<Vec<RedStep>, EngineError> {
        self.direct_step_prepared(&self.prepare(t))
    }

    pub(crate) fn direct_step_prepared(&self, t: &Term) -> Result<Vec<RedStep>, EngineError> {
        let mode = self.mode();
        let mut out: Vec<RedStep> = Vec::new();
        let emit = |rule, path: &Path, new: Term, out: &mut Vec<RedStep>| {
            let result = self.ac_normal(&t.replace_at(&path.0, new));
            if !out.iter().any(|s| s.rule == rule && s.position == *path && s.result == result) {
                out.push(RedStep {
                    rule,
                    position: path.clone(),
                    pre_equiv: None,
                    result,
                });
            }
        };
        for (path, _, u) in t.positions() {
            if mode == Mode::Standard && u.is_sum() && path.0.last() == Some(&1) {
                let parent = t.at(&Path(path.0[..path.0.len() - 1].to_vec())).expect("valid path");
                if parent.is_sum() {
                    // Inner node of a sum spine: not a subterm modulo AC.
                    continue;
                }
            }
            match u.kind() {
                TermKind::App(f, s) => {
                    if let TermKind::Lam(_, a, body) = f.kind() {
                        if self.type_of(s).as_ref() == Some(&crate::type_canon::canonical_in(mode, a)) {
                            emit(crate::reduction::RedRule::Beta, &path, Term::instantiate(body, s), &mut out);
                        }
                    }
                }
                TermKind::Proj(a, body) => {
                    let want = crate::type_canon::canonical_in(mode, a);
                    if self.type_of(body).as_ref() == Some(&want) {
                        emit(RedRule::Pi1, &path, body.clone(), &mut out);
                    }
                    if body.is_sum() {
                        match mode {
                            Mode::Standard => {
                                for part in proper_subsets(&body.summands()) {
                                    let r = Term::sum_all(part);
                                    if self.type_of(&r).as_ref() == Some(&want) {
                                        emit(RedRule::PiN, &path, r, &mut out);
                                    }
                                }
                            }
                            Mode::Deterministic => {
                                if let TermKind::Sum(u1, u2) = body.kind() {
                                    if self.type_of(u1).as_ref() == Some(&want) {
                                        emit(RedRule::PiN, &path, u1.clone(), &mut out);
                                    } else if self.type_of(u2).as_ref() == Some(&want) {
                                        emit(RedRule::PiN, &path, u2.clone(), &mut out);
                                    }
                                }
                            }
                        }
                    }
                }
                _ => {}
            }
            if !u.is_sum() {
                for new in self.delta(t, &path, &u)? {
                    emit(RedRule::Delta, &path, new, &mut out);
                }
            }
        }
        Ok(out)
    }

    /// `δ`-contracta of the non-sum subterm `u` at `path` of `t`.
    fn delta(&self, t: &Term, path: &Path, u: &Term) -> Result<Vec<Term>, EngineError> {
        let Some(ty) = self.type_of(u) else {
            return Ok(Vec::new());
        };
        if ty.len() < 2 {
            return Ok(Vec::new());
        }
        if self.class_of(u)?.sum_member.is_some() {
            return Ok(Vec::new());
        }
        if self.context_under_proj(t, path, &ty.to_type())? {
            return Ok(Vec::new());
        }
        Ok(ty
            .binary_splits(self.mode())
            .into_iter()
            .map(|(a, b)| Term::sum(Term::proj(a.to_type(), u.clone()), Term::proj(b.to_type(), u.clone())))
            .collect())
    }

    /// `Red(t)`: one representative per class reachable in one `⇝` step,
    /// ordered by size then structure.
    pub fn red_modulo(&self, t: &Term) -> Result<Vec<Successor>, EngineError> {
        let rep = self.representative(t)?;
        Ok(self.red_modulo_prepared(&rep)?.as_ref().clone())
    }

    pub(crate) fn red_modulo_prepared(&self, t: &Term) -> Result<Rc<Vec<Successor>>, EngineError> {
        let class = self.class_of(t)?;
        if let Some(s) = self.successors.borrow().get(&class.rep) {
            return Ok(s.clone());
        }
        let mut by_rep: HashMap<Term, Successor> = HashMap::new();
        for m in &class.members {
            for step in self.direct_step_prepared(m)? {
                let rep = self.class_of(&step.result)?.rep.clone();
                match by_rep.get_mut(&rep) {
                    Some(s) => {
                        s.rules.insert(step.rule);
                    }
                    None => {
                        by_rep.insert(
                            rep.clone(),
                            Successor {
                                representative: rep,
                                rules: BTreeSet::from([step.rule]),
                                witness: (m.clone(), step),
                            },
                        );
                    }
                }
            }
        }
        let mut succs: Vec<Successor> = by_rep.into_values().collect();
        succs.sort_by(|a, b| {
            let (a, b) = (&a.representative, &b.representative);
            a.size().cmp(&b.size()).then_with(|| a.cmp(b))
        });
        let succs = Rc::new(succs);
        self.successors.borrow_mut().insert(class.rep.clone(), succs.clone());
        Ok(succs)
    }

    pub fn is_normal(&self, t: &Term) -> Result<bool, EngineError> {
        Ok(self.red_modulo(t)?.is_empty())
    }

    fn search(&self) -> Search<'_> {
        Search {
            calc: self,
            expansions: 0,
            on_stack: HashSet::new(),
            longest: HashMap::new(),
        }
    }

    /// Every normal form reachable by `⇝*`, one representative per class.
    /// The search is a reachability closure, so it also terminates when
    /// some `⇝` sequences are infinite (see [`Calculus::max_steps`]).
    pub fn normalize_all(&self, t: &Term) -> Result<Vec<Term>, EngineError> {
        let rep = self.representative(t)?;
        let mut out: Vec<Term> = self
            .search()
            .reachable(&rep)?
            .into_iter()
            .filter(|(_, succs)| succs.is_empty())
            .map(|(c, _)| c)
            .collect();
        out.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
        Ok(out)
    }

    /// Length of the longest `⇝` path from `t`; [`EngineError::Cycle`] when
    /// a class can reach itself, i.e. when `t` is not strongly normalising.
    pub fn max_steps(&self, t: &Term) -> Result<u64, EngineError> {
        let rep = self.representative(t)?;
        self.search().longest(&rep)
    }

    /// One maximal `⇝` path, choosing uniformly among successor classes with
    /// a generator seeded by `seed`.
    pub fn normalize_random(&self, t: &Term, seed: u64) -> Result<Trace, EngineError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = self.prepare(t);
        let mut cur = start.clone();
        let mut steps = Vec::new();
        loop {
            let succs = self.red_modulo_prepared(&cur)?;
            if succs.is_empty() {
                break;
            }
            if steps.len() as u64 >= self.config.fuel.min(MAX_WALK) {
                return Err(EngineError::FuelExhausted {
                    fuel: self.config.fuel.min(MAX_WALK),
                });
            }
            let pick = &succs[rng.gen_range(0..succs.len())];
            let (member, step) = &pick.witness;
            let pre = self.equiv_path(&cur, member)?;
            let mut step = step.clone();
            step.pre_equiv = Some(pre);
            cur = step.result.clone();
            steps.push(step);
        }
        Ok(Trace { start, steps, end: cur })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn nfs(c: &Calculus, src: &str) -> Vec<Term> {
        c.normalize_all(&t(src)).unwrap()
    }

    fn same(c: &Calculus, got: &[Term], want: &[&str]) -> bool {
        got.len() == want.len()
            && want
                .iter()
                .all(|w| got.iter().any(|g| c.equiv_star(g, &t(w)).unwrap()))
    }

    #[test]
    fn beta_identity() {
        let c = Calculus::standard();
        let steps = c.direct_step(&t(r"(\x:A. x) s:A")).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].rule, RedRule::Beta);
        assert_eq!(steps[0].result, t("s:A"));
    }

    #[test]
    fn projection_is_non_deterministic() {
        let c = Calculus::standard();
        let steps = c.direct_step(&t("pi[A](r:A + u:A)")).unwrap();
        let results: Vec<_> = steps.iter().map(|s| s.result.clone()).collect();
        assert!(results.contains(&t("r:A")) && results.contains(&t("u:A")));
        let got = nfs(&c, "pi[A](r:A + u:A)");
        assert!(same(&c, &got, &["r:A", "u:A"]));
        let d = Calculus::deterministic();
        let got = nfs(&d, "pi[A](r:A + u:A)");
        assert!(same(&d, &got, &["r:A"]));
    }

    #[test]
    fn pi_one() {
        let c = Calculus::standard();
        let steps = c.direct_step(&t("pi[A](r:A)")).unwrap();
        assert!(steps.iter().any(|s| s.rule == RedRule::Pi1 && s.result == t("r:A")));
    }

    #[test]
    fn variables_are_normal() {
        let c = Calculus::standard();
        assert!(c.red_modulo(&t("x:A")).unwrap().is_empty());
        assert_eq!(c.max_steps(&t("x:A")).unwrap(), 0);
        assert_eq!(c.max_steps(&t(r"(\x:A. x) s:A")).unwrap(), 1);
        assert_eq!(c.max_steps(&t("pi[A](x:A + y:A)")).unwrap(), 1);
    }

    #[test]
    fn delta_is_blocked_under_projections() {
        let c = Calculus::standard();
        // x : A /\ B is not a sum; it may expand at top level...
        let steps = c.direct_step(&t(r"x:A/\B")).unwrap();
        assert!(steps.iter().any(|s| s.rule == RedRule::Delta));
        // ...but not right under a projection.
        let steps = c.direct_step(&t(r"pi[A](x:A/\B)")).unwrap();
        assert!(steps.iter().all(|s| s.rule != RedRule::Delta));
        // The expansion is a sum, hence normal for δ; but split and π_n
        // fold it back into x, so x reaches no normal form at all.
        let expanded = t(r"pi[A](x:A/\B) + pi[B](x:A/\B)");
        assert!(c.equiv_star(&expanded, &t(r"pi[A/\B](x:A/\B + x:A/\B)")).unwrap());
        assert!(nfs(&c, r"x:A/\B").is_empty());
        assert!(matches!(c.max_steps(&t(r"x:A/\B")), Err(EngineError::Cycle { .. })));
    }

    #[test]
    fn random_walks_are_reproducible() {
        let c = Calculus::standard();
        let a = c.normalize_random(&t("pi[A](r:A + u:A)"), 3).unwrap();
        let b = c.normalize_random(&t("pi[A](r:A + u:A)"), 3).unwrap();
        assert_eq!(a.lines(), b.lines());
        let ends: BTreeSet<Term> = (0..16)
            .map(|seed| c.normalize_random(&t("pi[A](r:A + u:A)"), seed).unwrap().end)
            .collect();
        assert_eq!(ends, BTreeSet::from([t("r:A"), t("u:A")]));
        let tr = c.normalize_random(&t(r"(\x:A. x) s:A"), 9).unwrap();
        assert_eq!(tr.steps.len(), 1);
        assert_eq!(tr.end, t("s:A"));
        assert!(c.normalize_random(&t("s:A"), 0).unwrap().steps.is_empty());
    }

    #[test]
    fn traces_replay() {
        let c = Calculus::standard();
        let tr = c.normalize_random(&t(r"pi[B->A]((\x:A/\B. x) s:A) t:B"), 1).unwrap();
        let mut cur = tr.start.clone();
        for step in &tr.steps {
            for e in step.pre_equiv.iter().flatten() {
                assert!(c.class_steps(&cur).contains(e));
                cur = e.result.clone();
            }
            assert!(c.direct_step_prepared(&cur).unwrap().iter().any(|s| s.result == step.result));
            cur = step.result.clone();
        }
        assert_eq!(cur, tr.end);
        assert_eq!(tr.end, t("s:A"));
    }
}
