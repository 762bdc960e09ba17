//! Random typed terms and executable versions of the metatheory:
//! strong normalisation, the shape of closed normal forms, the "strict
//! projections discard something" lemma, and the property suites that
//! drive all of them.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::measures::{measure_m, potential_p};
use crate::reduction::RedRule;
use crate::syntax::{Term, TermKind, Type};
use crate::term_equiv::{Calculus, Config, EngineError};
use crate::type_canon::{order_canonical, CanonicalType, ConjFree, Mode};
use crate::typing;

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_depth: u32,
    pub atoms: Vec<String>,
    pub seed: u64,
    pub sum_bias: u32,
    pub app_bias: u32,
    pub lam_bias: u32,
    pub proj_bias: u32,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            max_depth: 5,
            atoms: vec!["T1".into(), "T2".into(), "T3".into()],
            seed: 0,
            sum_bias: 3,
            app_bias: 2,
            lam_bias: 3,
            proj_bias: 2,
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64) -> GenConfig {
        GenConfig {
            seed,
            ..GenConfig::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Strategy {
    Var,
    Lam,
    Sum,
    App,
    Proj,
}

/// Type-directed generator: pick a target type, then build a derivation
/// backwards, one typing rule per node.
pub struct Generator {
    cfg: GenConfig,
    rng: ChaCha8Rng,
}

/// Attempts per requested term before the generator gives up on a target.
const RETRIES: usize = 10_000;

impl Generator {
    pub fn new(cfg: GenConfig) -> Generator {
        assert!(cfg.max_depth >= 1, "generator depth must be at least 1");
        assert!(!cfg.atoms.is_empty(), "generator needs at least one atom");
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Generator { cfg, rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn atom(&mut self) -> Type {
        let i = self.rng.gen_range(0..self.cfg.atoms.len());
        Type::atom(&self.cfg.atoms[i])
    }

    pub fn random_type(&mut self, depth: u32) -> Type {
        if depth == 0 {
            return self.atom();
        }
        match self.rng.gen_range(0..20) {
            0..=9 => self.atom(),
            10..=16 => Type::arrow(self.random_type(depth - 1), self.random_type(depth - 1)),
            _ => Type::conj(self.random_type(depth - 1), self.random_type(depth - 1)),
        }
    }

    /// A closed typable term.
    pub fn term(&mut self) -> Term {
        for _ in 0..RETRIES {
            let ty = self.random_type(2);
            if let Some(t) = self.term_of(&ty) {
                return t;
            }
        }
        panic!("generator found no closed term in {RETRIES} attempts");
    }

    /// A closed term of type `ty`, if one is found within the depth bound.
    pub fn term_of(&mut self, ty: &Type) -> Option<Term> {
        let lo = self.cfg.max_depth.div_ceil(2);
        let depth = self.rng.gen_range(lo..=self.cfg.max_depth);
        self.gen(ty, depth, &mut Vec::new())
    }

    /// A closed term whose type has at least two conjuncts.
    pub fn conjunctive_term(&mut self) -> Term {
        for _ in 0..RETRIES {
            let ty = Type::conj(self.random_type(1), self.random_type(1));
            if let Some(t) = self.term_of(&ty) {
                return t;
            }
        }
        panic!("generator found no conjunctive term in {RETRIES} attempts");
    }

    fn strategies(&mut self) -> Vec<Strategy> {
        let c = &self.cfg;
        let mut weighted = vec![
            (Strategy::Var, 1),
            (Strategy::Lam, c.lam_bias),
            (Strategy::Sum, c.sum_bias),
            (Strategy::App, c.app_bias),
            (Strategy::Proj, c.proj_bias),
        ];
        let mut order = Vec::new();
        while !weighted.is_empty() {
            let total: u32 = weighted.iter().map(|(_, w)| *w).sum();
            if total == 0 {
                order.extend(weighted.iter().map(|(s, _)| *s));
                break;
            }
            let mut pick = self.rng.gen_range(0..total);
            let i = weighted
                .iter()
                .position(|(_, w)| {
                    if pick < *w {
                        true
                    } else {
                        pick -= w;
                        false
                    }
                })
                .expect("weights add up");
            order.push(weighted.remove(i).0);
        }
        order
    }

    /// `env[k]` is the type of de Bruijn index `env.len() - 1 - k`.
    fn gen(&mut self, ty: &Type, depth: u32, env: &mut Vec<Type>) -> Option<Term> {
        let can = order_canonical(ty);
        if depth == 0 {
            return self.var(&can, env);
        }
        for s in self.strategies() {
            let got = match s {
                Strategy::Var => self.var(&can, env),
                Strategy::Lam => self.lam(ty, &can, depth, env),
                Strategy::Sum => self.sum(ty, &can, depth, env),
                Strategy::App => self.app(ty, depth, env),
                Strategy::Proj => self.proj(ty, depth, env),
            };
            if got.is_some() {
                return got;
            }
        }
        None
    }

    fn var(&mut self, can: &CanonicalType, env: &[Type]) -> Option<Term> {
        let hits: Vec<usize> = (0..env.len()).filter(|&k| order_canonical(&env[k]) == *can).collect();
        let &k = hits.choose(&mut self.rng)?;
        Some(Term::bound((env.len() - 1 - k) as u32, env[k].clone()))
    }

    fn lam(&mut self, ty: &Type, can: &CanonicalType, depth: u32, env: &mut Vec<Type>) -> Option<Term> {
        let (dom, cod) = match ty {
            Type::Arrow(d, c) => ((**d).clone(), (**c).clone()),
            _ => {
                // A single conjunct `S1 -> ... -> Sk -> a`: bind a random
                // non-empty selection of the arguments at once.
                let [c] = can.conjuncts.as_slice() else { return None };
                if c.args.is_empty() {
                    return None;
                }
                let mut args = c.args.clone();
                args.shuffle(&mut self.rng);
                let k = self.rng.gen_range(1..=args.len().min(2));
                let dom = Type::conj_all(args[..k].iter().map(ConjFree::to_type).collect());
                let rest = ConjFree {
                    args: args[k..].to_vec(),
                    target: c.target.clone(),
                };
                (dom, rest.to_type())
            }
        };
        env.push(dom.clone());
        let body = self.gen(&cod, depth - 1, env);
        env.pop();
        Some(Term::lam_raw(Arc::from("x"), dom, body?))
    }

    fn sum(&mut self, ty: &Type, can: &CanonicalType, depth: u32, env: &mut Vec<Type>) -> Option<Term> {
        let (l, r) = match ty {
            Type::Conj(l, r) => ((**l).clone(), (**r).clone()),
            _ => {
                let mut splits = can.binary_splits(Mode::Standard);
                if splits.is_empty() {
                    return None;
                }
                let i = self.rng.gen_range(0..splits.len());
                let (a, b) = splits.swap_remove(i);
                (a.to_type(), b.to_type())
            }
        };
        let l = self.gen(&l, depth - 1, env)?;
        let r = self.gen(&r, depth - 1, env)?;
        Some(Term::sum(l, r))
    }

    fn app(&mut self, ty: &Type, depth: u32, env: &mut Vec<Type>) -> Option<Term> {
        let arg_ty = if !env.is_empty() && self.rng.gen_bool(0.5) {
            env.choose(&mut self.rng).cloned()?
        } else {
            self.random_type(1)
        };
        let f = self.gen(&Type::arrow(arg_ty.clone(), ty.clone()), depth - 1, env)?;
        let a = self.gen(&arg_ty, depth - 1, env)?;
        Some(Term::app(f, a))
    }

    fn proj(&mut self, ty: &Type, depth: u32, env: &mut Vec<Type>) -> Option<Term> {
        let inner = if self.rng.gen_bool(0.25) {
            ty.clone()
        } else {
            Type::conj(ty.clone(), self.random_type(1))
        };
        let body = self.gen(&inner, depth - 1, env)?;
        Some(Term::proj(ty.clone(), body))
    }
}

/// One closed typable term per configuration; same configuration, same term.
pub fn gen_typed_term(cfg: &GenConfig) -> Term {
    Generator::new(cfg.clone()).term()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SnReport {
    pub terminated: bool,
    /// Longest `⇝` path; absent when some path is infinite.
    pub ns: Option<u64>,
    pub nf_count: usize,
    /// A class on an infinite path.
    pub cycle: Option<String>,
}

/// Runs both searches with the given fuel. A cycle is reported, not raised;
/// exhausting the fuel or the class cap is an error.
pub fn check_sn(t: &Term, fuel: u64) -> Result<SnReport, EngineError> {
    let calc = Calculus::new(Config {
        fuel,
        ..Config::default()
    });
    check_sn_with(&calc, t)
}

pub fn check_sn_with(calc: &Calculus, t: &Term) -> Result<SnReport, EngineError> {
    let nf_count = calc.normalize_all(t)?.len();
    let (ns, cycle) = match calc.max_steps(t) {
        Ok(n) => (Some(n), None),
        Err(EngineError::Cycle { term }) => (None, Some(term)),
        Err(e) => return Err(e),
    };
    Ok(SnReport {
        terminated: cycle.is_none(),
        ns,
        nf_count,
        cycle,
    })
}

/// `Σ λx^{Ai}.si + Σ (λx^{Bj∧Cj}.rj) tj`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsnShape {
    /// Binder type and body of each abstraction.
    pub lambda_group: Vec<(Type, Term)>,
    /// Binder type, body and argument of each stuck application; the
    /// argument's type is strictly included in the binder's.
    pub stuck_group: Vec<(Type, Term, Term)>,
    /// The class member exhibiting the shape.
    pub witness: Term,
}

impl fmt::Display for CsnShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n = {}, m = {} via {}",
            self.lambda_group.len(),
            self.stuck_group.len(),
            self.witness
        )
    }
}

fn csn_shape(calc: &Calculus, m: &Term) -> Option<CsnShape> {
    let mut lambda_group = Vec::new();
    let mut stuck_group = Vec::new();
    for s in m.summands() {
        match s.kind() {
            TermKind::Lam(_, a, body) => lambda_group.push((a.clone(), body.clone())),
            TermKind::App(f, arg) => {
                let TermKind::Lam(_, b, body) = f.kind() else { return None };
                let arg_ty = calc.type_of(arg)?;
                if !order_canonical(b).strictly_includes(&arg_ty) {
                    return None;
                }
                stuck_group.push((b.clone(), body.clone(), arg.clone()));
            }
            _ => return None,
        }
    }
    Some(CsnShape {
        lambda_group,
        stuck_group,
        witness: m.clone(),
    })
}

/// Looks through the class of a closed normal form for a member of the
/// characteristic shape. `None` is a counterexample.
pub fn check_csn(t: &Term) -> Result<Option<CsnShape>, EngineError> {
    check_csn_with(&Calculus::standard(), t)
}

pub fn check_csn_with(calc: &Calculus, t: &Term) -> Result<Option<CsnShape>, EngineError> {
    let class = calc.enumerate_class(t)?;
    Ok(class.members.iter().find_map(|m| csn_shape(calc, m)))
}

/// Whether every maximal `⇝` path from `π_a(t)`, finite or not, takes at
/// least one `πₙ` step. A path avoids `πₙ` as long as each class-to-class
/// move can be made by another rule.
pub fn check_redpi(t: &Term, a: &Type) -> Result<bool, EngineError> {
    check_redpi_with(&Calculus::standard(), t, a)
}

pub fn check_redpi_with(calc: &Calculus, t: &Term, a: &Type) -> Result<bool, EngineError> {
    Ok(redpi_escape(calc, t, a)?.is_none())
}

/// A class from which a `πₙ`-free path continues forever or stops at a
/// normal form, when there is one.
pub fn redpi_escape(calc: &Calculus, t: &Term, a: &Type) -> Result<Option<Term>, EngineError> {
    let start = calc.representative(&Term::proj(a.clone(), t.clone()))?;
    // Colours for cycle detection in the πₙ-free subgraph.
    let mut state: HashMap<Term, bool> = HashMap::new();
    let mut expansions = 0u64;
    fn go(
        calc: &Calculus,
        cur: &Term,
        state: &mut HashMap<Term, bool>,
        expansions: &mut u64,
    ) -> Result<Option<Term>, EngineError> {
        match state.get(cur) {
            Some(true) => return Ok(Some(cur.clone())),
            Some(false) => return Ok(None),
            None => {}
        }
        *expansions += 1;
        if *expansions > calc.config().fuel {
            return Err(EngineError::FuelExhausted { fuel: calc.config().fuel });
        }
        let succs = calc.red_modulo(cur)?;
        if succs.is_empty() {
            return Ok(Some(cur.clone()));
        }
        state.insert(cur.clone(), true);
        for s in &succs {
            if s.rules.iter().any(|r| *r != RedRule::PiN) {
                if let Some(w) = go(calc, &s.representative, state, expansions)? {
                    return Ok(Some(w));
                }
            }
        }
        state.insert(cur.clone(), false);
        Ok(None)
    }
    go(calc, &start, &mut state, &mut expansions)
}

pub const PROPERTIES: [&str; 9] = [
    "subject_reduction",
    "m_invariance",
    "p_invariance",
    "class_finiteness",
    "sn",
    "csn",
    "redpi",
    "substitution_lemma",
    "unicity",
];

#[derive(Clone, Debug, Serialize)]
pub struct PropFailure {
    pub trial: u64,
    pub term: String,
    pub shrunk: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub trials: u64,
    pub seed: u64,
    /// Individual facts verified across conclusive trials (successors,
    /// normal forms, paths...).
    pub checked: u64,
    pub failures: Vec<PropFailure>,
    /// Trials the engine could not decide within its class cap or fuel.
    pub inconclusive: Vec<(u64, String)>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn conclusive(&self) -> u64 {
        self.trials - self.inconclusive.len() as u64
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} trials (seed {}), {} facts checked, {} failure(s), {} inconclusive",
            self.name,
            self.trials,
            self.seed,
            self.checked,
            self.failures.len(),
            self.inconclusive.len()
        )?;
        for fl in &self.failures {
            writeln!(f, "  trial {}: {}", fl.trial, fl.detail)?;
            writeln!(f, "    term:   {}", fl.term)?;
            if fl.shrunk != fl.term {
                writeln!(f, "    shrunk: {}", fl.shrunk)?;
            }
        }
        for (trial, why) in &self.inconclusive {
            writeln!(f, "  trial {trial} inconclusive: {why}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum Flaw {
    Fail(String),
    /// The engine hit a limit before the property could be decided.
    Inconclusive(String),
}

impl From<String> for Flaw {
    fn from(s: String) -> Flaw {
        Flaw::Fail(s)
    }
}

fn limit(e: EngineError) -> Flaw {
    Flaw::Inconclusive(e.to_string())
}

fn fail(e: EngineError) -> Flaw {
    Flaw::Fail(e.to_string())
}

/// Number of facts checked, or why the property does not hold.
type Verdict = Result<u64, Flaw>;

enum TrialResult {
    Pass(u64),
    Fail(PropFailure),
    Inconclusive(String),
}

/// Class cap used by the suites: generated terms are meant to stay well
/// below it.
pub const SUITE_CLASS_CAP: usize = 10_000;

pub fn suite_calculus() -> Calculus {
    Calculus::new(Config {
        class_cap: SUITE_CLASS_CAP,
        ..Config::default()
    })
}

fn per_trial_seed(seed: u64, trial: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(trial)
}

/// Runs the named property on `trials` generated instances. Trials run on
/// all cores; the report depends only on the arguments.
pub fn run_property_suite(name: &str, trials: u64, seed: u64) -> Result<SuiteReport, String> {
    let prop = property(name)?;
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(trials.max(1) as usize);
    let next = std::sync::atomic::AtomicU64::new(0);
    let mut results: Vec<(u64, TrialResult)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|_| {
                s.spawn(|| {
                    let mut out = Vec::new();
                    loop {
                        let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        if i >= trials {
                            break;
                        }
                        out.push((i, run_trial(prop, i, per_trial_seed(seed, i))));
                    }
                    out
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("trial panicked")).collect()
    });
    results.sort_by_key(|(i, _)| *i);
    let mut report = SuiteReport {
        name: name.to_string(),
        trials,
        seed,
        checked: 0,
        failures: Vec::new(),
        inconclusive: Vec::new(),
    };
    for (i, r) in results {
        match r {
            TrialResult::Pass(n) => report.checked += n,
            TrialResult::Fail(f) => report.failures.push(f),
            TrialResult::Inconclusive(why) => report.inconclusive.push((i, why)),
        }
    }
    Ok(report)
}

/// A property: draws its instance from the generator, then judges it.
#[derive(Clone, Copy)]
struct Property {
    draw: fn(&mut Generator) -> Instance,
    judge: fn(&Calculus, &Instance) -> Verdict,
}

#[derive(Clone, Debug)]
struct Instance {
    term: Term,
    /// Projection type for `redpi`.
    ty: Option<Type>,
}

fn draw_term(g: &mut Generator) -> Instance {
    Instance { term: g.term(), ty: None }
}

fn property(name: &str) -> Result<Property, String> {
    let p = |judge| Property { draw: draw_term, judge };
    Ok(match name {
        "subject_reduction" => p(subject_reduction),
        "m_invariance" => p(m_invariance),
        "p_invariance" => p(p_invariance),
        "class_finiteness" => p(class_finiteness),
        "sn" => p(sn),
        "csn" => p(csn),
        "redpi" => Property {
            draw: draw_redpi,
            judge: redpi,
        },
        "substitution_lemma" => Property {
            draw: draw_redex,
            judge: substitution_lemma,
        },
        "unicity" => p(unicity),
        other => return Err(format!("unknown property `{other}`; expected one of {}", PROPERTIES.join(", "))),
    })
}

fn run_trial(prop: Property, trial: u64, seed: u64) -> TrialResult {
    let mut g = Generator::new(GenConfig::with_seed(seed));
    let inst = (prop.draw)(&mut g);
    let judge = |i: &Instance| (prop.judge)(&suite_calculus(), i);
    let detail = match judge(&inst) {
        Ok(n) => return TrialResult::Pass(n),
        Err(Flaw::Inconclusive(why)) => return TrialResult::Inconclusive(why),
        Err(Flaw::Fail(detail)) => detail,
    };
    let shrunk = shrink(&inst, &|i| matches!(judge(i), Err(Flaw::Fail(_))));
    TrialResult::Fail(PropFailure {
        trial,
        term: inst.term.to_string(),
        shrunk: shrunk.term.to_string(),
        detail,
    })
}

/// Greedy shrinking: replace a subterm by a smaller subterm found inside
/// it, as long as the whole term keeps its type and still fails.
fn shrink(inst: &Instance, fails: &dyn Fn(&Instance) -> bool) -> Instance {
    let mut cur = inst.clone();
    let Ok(ty) = typing::infer(&cur.term) else { return cur };
    'outer: for _ in 0..64 {
        for (path, _, u) in cur.term.positions() {
            for (_, _, v) in u.positions().into_iter().skip(1) {
                // Only pieces without loose indices can move up safely.
                if v.has_loose_bound() {
                    continue;
                }
                let cand = cur.term.replace_at(&path.0, v.clone());
                if cand.size() >= cur.term.size() {
                    continue;
                }
                match typing::infer(&cand) {
                    Ok(r) if r.canonical == ty.canonical => {}
                    _ => continue,
                }
                let next = Instance {
                    term: cand,
                    ty: cur.ty.clone(),
                };
                if fails(&next) {
                    cur = next;
                    continue 'outer;
                }
            }
        }
        break;
    }
    cur
}

fn same_type(t: &Term, want: &CanonicalType) -> Result<(), String> {
    match typing::infer(t) {
        Ok(r) if r.canonical == *want => Ok(()),
        Ok(r) => Err(format!("type changed to {} in {t}", r.ty)),
        Err(e) => Err(format!("untypable {t}: {e}")),
    }
}

fn base_type(t: &Term) -> Result<CanonicalType, String> {
    typing::infer(t)
        .map(|r| r.canonical)
        .map_err(|e| format!("generated term is untypable: {e}"))
}

fn subject_reduction(calc: &Calculus, i: &Instance) -> Verdict {
    let t = &i.term;
    let want = base_type(t)?;
    let mut n = 0;
    for m in sample_members(calc, t)? {
        for s in calc.equiv_step(&m) {
            same_type(&s.result, &want).map_err(|e| format!("after {}{} on {m}: {e}", s.rule, dir(&s)))?;
            n += 1;
        }
    }
    for s in calc.direct_step(t).map_err(limit)? {
        same_type(&s.result, &want).map_err(|e| format!("after {}: {e}", s.rule))?;
        n += 1;
    }
    for s in calc.red_modulo(t).map_err(limit)? {
        same_type(&s.representative, &want).map_err(|e| format!("after ⇝ {:?}: {e}", s.rules))?;
        same_type(&s.witness.1.result, &want).map_err(|e| format!("after {}: {e}", s.witness.1.rule))?;
        n += 1;
    }
    Ok(n)
}

fn dir(s: &crate::term_equiv::EquivStep) -> &'static str {
    match s.direction {
        crate::term_equiv::Direction::LR => "->",
        crate::term_equiv::Direction::RL => "<-",
    }
}

fn measure_invariance(calc: &Calculus, i: &Instance, what: &str, f: fn(&Term) -> u64) -> Verdict {
    let t = &i.term;
    let want = f(t);
    let mut n = 0;
    for m in sample_members(calc, t)? {
        for s in calc.equiv_step(&m) {
            let got = f(&s.result);
            if got != want {
                return Err(format!("{what} {want} became {got} after {}{} on {m}: {}", s.rule, dir(&s), s.result).into());
            }
            n += 1;
        }
    }
    Ok(n)
}

/// Members examined per term by the one-step properties.
const MEMBER_SAMPLE: usize = 64;

/// `t` itself plus the first members of its class in discovery order.
fn sample_members(calc: &Calculus, t: &Term) -> Result<Vec<Term>, Flaw> {
    let class = calc.enumerate_class(t).map_err(limit)?;
    let mut out = vec![t.clone()];
    out.extend(class.members.into_iter().filter(|m| m != t).take(MEMBER_SAMPLE - 1));
    Ok(out)
}

fn m_invariance(calc: &Calculus, i: &Instance) -> Verdict {
    measure_invariance(calc, i, "M", measure_m)
}

fn p_invariance(calc: &Calculus, i: &Instance) -> Verdict {
    measure_invariance(calc, i, "P", potential_p)
}

fn class_finiteness(calc: &Calculus, i: &Instance) -> Verdict {
    let class = calc.enumerate_class(&i.term).map_err(fail)?;
    if class.members.len() > calc.config().class_cap {
        return Err(format!("{} members exceed the cap", class.members.len()).into());
    }
    let want = measure_m(&class.representative);
    if let Some(m) = class.members.iter().find(|m| measure_m(m) != want) {
        return Err(format!("member {m} has M {} but the representative has {want}", measure_m(m)).into());
    }
    Ok(class.members.len() as u64)
}

fn sn(calc: &Calculus, i: &Instance) -> Verdict {
    let r = check_sn_with(calc, &i.term).map_err(fail)?;
    match r.cycle {
        None => Ok(r.ns.unwrap_or(0)),
        Some(c) => Err(format!("infinite reduction through {c}").into()),
    }
}

fn csn(calc: &Calculus, i: &Instance) -> Verdict {
    let nfs = calc.normalize_all(&i.term).map_err(limit)?;
    for nf in &nfs {
        if check_csn_with(calc, nf).map_err(limit)?.is_none() {
            return Err(format!("closed normal form {nf} has no member of the expected shape").into());
        }
    }
    Ok(nfs.len() as u64)
}

fn draw_redpi(g: &mut Generator) -> Instance {
    let term = g.conjunctive_term();
    let can = typing::infer(&term).expect("generated term typechecks").canonical;
    let mut parts: Vec<CanonicalType> =
        can.sub_multisets(Mode::Standard).into_iter().filter(|c| c.len() < can.len()).collect();
    parts.sort_by_key(|c| c.to_type());
    let ty = parts.choose(g.rng()).expect("two conjuncts have a proper part").to_type();
    Instance { term, ty: Some(ty) }
}

fn redpi(calc: &Calculus, i: &Instance) -> Verdict {
    let a = i.ty.as_ref().expect("redpi instances carry a type");
    let can = base_type(&i.term)?;
    if !can.strictly_includes(&order_canonical(a)) {
        // Shrinking may have changed the shape; such candidates are not
        // counterexamples.
        return Ok(0);
    }
    match redpi_escape(calc, &i.term, a).map_err(limit)? {
        None => Ok(1),
        Some(w) => Err(format!("π[{a}] has a path without πₙ through {w}").into()),
    }
}

/// `(λx^B.r) s`, drawn so that the body and the argument are both typable.
fn draw_redex(g: &mut Generator) -> Instance {
    for _ in 0..RETRIES {
        let b = g.random_type(1);
        let a = g.random_type(2);
        let max = g.cfg.max_depth;
        let depth = g.rng().gen_range(1..=max);
        let Some(body) = g.gen(&a, depth, &mut vec![b.clone()]) else { continue };
        let Some(s) = g.term_of(&b) else { continue };
        let term = Term::app(Term::lam_raw(Arc::from("x"), b, body), s);
        return Instance { term, ty: None };
    }
    panic!("generator found no redex in {RETRIES} attempts");
}

fn substitution_lemma(_: &Calculus, i: &Instance) -> Verdict {
    let TermKind::App(f, s) = i.term.kind() else { return Ok(0) };
    let TermKind::Lam(_, _, body) = f.kind() else { return Ok(0) };
    // r : A is read off λx^B.r : B -> A through the generation lemma.
    let want = match typing::invert(f) {
        Ok(typing::Generation::Lam { body, .. }) => body,
        other => return Err(format!("no decomposition for {f}: {other:?}").into()),
    };
    same_type(&Term::instantiate(body, s), &want)?;
    Ok(1)
}

/// Every type equivalent to the inferred one is accepted, and a type that
/// is not equivalent is rejected.
fn unicity(_: &Calculus, i: &Instance) -> Verdict {
    let t = &i.term;
    let can = base_type(t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(t.size() as u64);
    let mut n = 0;
    for _ in 0..4 {
        let variant = iso_variant(&mut rng, &can);
        match typing::check(t, &variant) {
            Ok(true) => n += 1,
            other => return Err(format!("rejected equivalent type {variant}: {other:?}").into()),
        }
    }
    let extra = Type::conj(can.to_type(), Type::atom("T1"));
    let mut wrong: Vec<Type> = vec![extra];
    if can.len() > 1 {
        wrong.push(CanonicalType {
            conjuncts: can.conjuncts[1..].to_vec(),
        }
        .to_type());
    }
    for w in wrong {
        if matches!(typing::check(t, &w), Ok(true)) {
            return Err(format!("accepted {w} besides {}", can.to_type()).into());
        }
        n += 1;
    }
    Ok(n)
}

/// A random type isomorphic to `can`: conjuncts shuffled and regrouped,
/// arguments permuted, some of them merged into a conjunctive domain.
pub fn iso_variant(rng: &mut ChaCha8Rng, can: &CanonicalType) -> Type {
    let mut parts: Vec<Type> = can.conjuncts.iter().map(|c| conj_free_variant(rng, c)).collect();
    parts.shuffle(rng);
    regroup(rng, parts)
}

fn conj_free_variant(rng: &mut ChaCha8Rng, c: &ConjFree) -> Type {
    let mut args: Vec<Type> = c.args.iter().map(|a| conj_free_variant(rng, a)).collect();
    args.shuffle(rng);
    let mut doms = Vec::new();
    while !args.is_empty() {
        let k = rng.gen_range(1..=args.len().min(2));
        let group: Vec<Type> = args.drain(..k).collect();
        doms.push(regroup(rng, group));
    }
    Type::arrows(doms, Type::Atom(c.target.clone()))
}

fn regroup(rng: &mut ChaCha8Rng, mut parts: Vec<Type>) -> Type {
    while parts.len() > 1 {
        let i = rng.gen_range(0..parts.len() - 1);
        let r = parts.remove(i + 1);
        let l = parts.remove(i);
        parts.insert(i, Type::conj(l, r));
    }
    parts.pop().expect("a type has at least one conjunct")
}
