//! Command-line front end. Exit codes: 0 success, 1 errors in the object
//! language (parse, type, engine limits) or failing properties, 2 usage.

use std::io::{self, Write};
use std::path::{Path as FsPath, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use crate::analysis::{run_property_suite, PROPERTIES};
use crate::encodings::{self, EncodingError};
use crate::measures;
use crate::syntax::{parse_program, Ident, ParseError, Term, Type};
use crate::term_equiv::{Calculus, Config, EngineError};
use crate::type_canon::Mode;
use crate::typing::{self, TypeError};

#[derive(Debug, Parser)]
#[command(name = "isolambda", version, about = "Typed lambda-calculus modulo type isomorphisms")]
pub struct Cli {
    /// Drop commutativity and associativity: sums become positional.
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Allowed atoms, comma separated; programs using others are rejected.
    #[arg(long, global = true, value_delimiter = ',')]
    pub atoms: Option<Vec<String>>,
    /// Structured output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Infer the type of a program.
    Typecheck { file: PathBuf },
    /// Reduce a program: every normal form, or one random path.
    Reduce {
        file: PathBuf,
        /// Print every reachable normal form (the default).
        #[arg(long, conflicts_with = "seed")]
        all: bool,
        /// Follow one path, choosing successors with this seed.
        #[arg(long)]
        seed: Option<u64>,
        /// With --seed, print every step.
        #[arg(long, requires = "seed")]
        trace: bool,
        /// Maximum number of equivalence classes expanded.
        #[arg(long, env = "ISOLAMBDA_FUEL")]
        fuel: Option<u64>,
    },
    /// List the equivalence class of a program.
    Class { file: PathBuf },
    /// Print the measures S, P and M.
    Measure { file: PathBuf },
    /// Run a property suite over generated terms.
    Prop {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(PROPERTIES))]
        name: String,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Replay the library constructions: pairs, lists, booleans.
    Demo {
        #[arg(value_enum, default_value_t = DemoName::All)]
        name: DemoName,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    All,
    Pairs,
    Lists,
    Canon,
    Booleans,
    Naive,
    Deterministic,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}:{source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: {message}")]
    Atoms { path: String, message: String },
    #[error("{0}")]
    Type(#[from] TypeError),
    #[error("{0}")]
    Engine(#[from] EngineError),
    #[error("{0}")]
    Encoding(#[from] EncodingError),
    #[error("{0}")]
    Output(#[from] io::Error),
    /// Something to report after the output has been written.
    #[error("{0}")]
    Unsuccessful(String),
}

impl Cli {
    fn mode(&self) -> Mode {
        if self.deterministic {
            Mode::Deterministic
        } else {
            Mode::Standard
        }
    }

    fn load(&self, path: &FsPath) -> Result<Term, CliError> {
        let shown = path.display().to_string();
        let src = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: shown.clone(),
            source,
        })?;
        let prog = parse_program(&src).map_err(|source| CliError::Parse {
            path: shown.clone(),
            source,
        })?;
        if let Some(atoms) = &self.atoms {
            let alphabet: Vec<Ident> = atoms.iter().map(|a| Ident::from(a.trim())).collect();
            prog.check_atoms(&alphabet)
                .map_err(|message| CliError::Atoms { path: shown, message })?;
        }
        typing::infer_in(self.mode(), &prog.term)?;
        Ok(prog.term)
    }

    fn calculus(&self, fuel: Option<u64>) -> Calculus {
        let mut config = Config::with_mode(self.mode());
        if let Some(f) = fuel {
            config.fuel = f;
        }
        Calculus::new(config)
    }
}

/// Parses `std::env::args`, runs, and returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(()) => 0,
        // The reader went away (`| head`); nothing left to say.
        Err(CliError::Output(e)) if e.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Typecheck { file } => {
            let t = cli.load(file)?;
            let r = typing::infer_in(cli.mode(), &t)?;
            if cli.json {
                writeln!(out, "{}", json!({ "type": r.ty.to_string(), "canonical": r.canonical.to_string() }))?;
            } else {
                writeln!(out, ": {}", r.ty)?;
            }
        }
        Command::Reduce {
            file,
            all: _,
            seed,
            trace,
            fuel,
        } => {
            let t = cli.load(file)?;
            let calc = cli.calculus(*fuel);
            match seed {
                Some(seed) => {
                    let tr = calc.normalize_random(&t, *seed)?;
                    if cli.json {
                        writeln!(out, "{}", serde_json::to_string_pretty(&tr.to_json()).expect("json"))?;
                    } else if *trace {
                        writeln!(out, "{}", tr.start)?;
                        for line in tr.lines() {
                            writeln!(out, "{line}")?;
                        }
                    } else {
                        writeln!(out, "{}", tr.end)?;
                    }
                }
                None => {
                    let nfs = calc.normalize_all(&t)?;
                    if cli.json {
                        let v: Vec<String> = nfs.iter().map(Term::to_string).collect();
                        writeln!(out, "{}", json!({ "normal_forms": v }))?;
                    } else {
                        for nf in &nfs {
                            writeln!(out, "{nf}")?;
                        }
                    }
                    if nfs.is_empty() {
                        return Err(CliError::Unsuccessful(
                            "no normal form is reachable: every path is infinite".into(),
                        ));
                    }
                }
            }
        }
        Command::Class { file } => {
            let t = cli.load(file)?;
            let class = cli.calculus(None).enumerate_class(&t)?;
            let mut members = class.members.clone();
            members.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.cmp(b)));
            if cli.json {
                let v: Vec<String> = members.iter().map(Term::to_string).collect();
                writeln!(
                    out,
                    "{}",
                    json!({ "representative": class.representative.to_string(), "size": v.len(), "members": v })
                )?;
            } else {
                writeln!(out, "representative: {}", class.representative)?;
                writeln!(out, "members: {}", members.len())?;
                for m in &members {
                    writeln!(out, "  {m}")?;
                }
            }
        }
        Command::Measure { file } => {
            let t = cli.load(file)?;
            let m = measures::triple(&t);
            if cli.json {
                writeln!(out, "{}", serde_json::to_string(&m).expect("json"))?;
            } else {
                writeln!(out, "S = {}\nP = {}\nM = {}", m.s, m.p, m.m)?;
            }
        }
        Command::Prop { name, trials, seed } => {
            let report = run_property_suite(name, *trials, *seed).map_err(CliError::Unsuccessful)?;
            if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("json"))?;
            } else {
                write!(out, "{report}")?;
            }
            if !report.passed() {
                return Err(CliError::Unsuccessful(format!(
                    "{} of {} trials failed",
                    report.failures.len(),
                    report.trials
                )));
            }
        }
        Command::Demo { name } => demo(*name, out)?,
    }
    Ok(())
}

fn show(calc: &Calculus, title: &str, t: &Term, out: &mut dyn Write) -> Result<(), CliError> {
    writeln!(out, "== {title}")?;
    writeln!(out, "term:  {t}")?;
    writeln!(out, "type:  {}", typing::infer_in(calc.mode(), t)?.ty)?;
    let nfs = calc.normalize_all(t)?;
    let shown: Vec<String> = nfs.iter().map(Term::to_string).collect();
    writeln!(out, "normal forms: {{{}}}", shown.join(", "))?;
    let tr = calc.normalize_random(t, 0)?;
    writeln!(out, "trace (seed 0):")?;
    for line in tr.lines() {
        writeln!(out, "  {line}")?;
    }
    writeln!(out)?;
    Ok(())
}

fn free(name: &str, ty: &str) -> Term {
    Term::free(name, Type::atom(ty))
}

fn demo(name: DemoName, out: &mut dyn Write) -> Result<(), CliError> {
    let calc = Calculus::standard();
    let want = |d: DemoName| name == DemoName::All || name == d;
    let (r, s) = (free("r", "A"), free("s", "A"));
    if want(DemoName::Pairs) {
        let p = encodings::mk_pair(&r, &s)?;
        show(&calc, "pair of two terms of the same type", &p, out)?;
        show(&calc, "first component", &encodings::mk_fst(&p)?, out)?;
        show(&calc, "second component", &encodings::mk_snd(&p)?, out)?;
    }
    if want(DemoName::Lists) {
        let items = [free("a", "A"), free("b", "A"), free("c", "A")];
        let l = encodings::mk_list(&items)?;
        for i in 0..items.len() {
            show(&calc, &format!("element {i} of a three-element list"), &encodings::mk_nth(&l, i)?, out)?;
        }
    }
    if want(DemoName::Canon) {
        let x = free("x", "B");
        let a = Type::atom("A");
        let c = encodings::canon(&x, &a);
        show(&calc, "cocanon of canon", &encodings::cocanon(&c, &Type::arrow(a, Type::atom("B")))?, out)?;
    }
    if want(DemoName::Booleans) {
        let b = Type::atom("B");
        let (r, s) = (free("r", "B"), free("s", "B"));
        for v in [true, false] {
            let c = encodings::mk_bool(v, &b);
            let label = if v { "TT" } else { "FF" };
            show(&calc, &format!("if {label} then r else s"), &encodings::mk_ite(&c, &r, &s)?, out)?;
        }
    }
    if want(DemoName::Naive) {
        let a = Type::atom("A");
        for v in [true, false] {
            let t = Term::apps(encodings::naive_bool(v, &a), [r.clone(), s.clone()]);
            let label = if v { "TRUE" } else { "FALSE" };
            show(&calc, &format!("{label} r s at A -> A -> A: both results"), &t, out)?;
        }
    }
    if want(DemoName::Deterministic) {
        let a = Type::atom("A");
        let t = Term::proj(a, Term::sum(r.clone(), s.clone()));
        show(&calc, "projection out of r + s", &t, out)?;
        show(&Calculus::deterministic(), "the same, deterministic subsystem", &t, out)?;
    }
    Ok(())
}
