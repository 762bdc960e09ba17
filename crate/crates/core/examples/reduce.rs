//! Reduction modulo isomorphism: every normal form, and one seeded path.
//!
//!   cargo run --example reduce [-- FILE.lam [SEED]]

use isolambda::{parse_program, Calculus};

const DEFAULT: &str = r"atoms A B;
pi[A -> B -> A](\x:A. \y:B. x + y) r:A s:B";

fn main() {
    let mut args = std::env::args().skip(1);
    let src = match args.next() {
        Some(path) => std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}")),
        None => DEFAULT.to_string(),
    };
    let seed = args.next().map_or(0, |s| s.parse().expect("seed"));
    let term = parse_program(&src).unwrap_or_else(|e| panic!("{e}")).term;
    let calc = Calculus::standard();

    println!("{term}");
    match calc.normalize_all(&term) {
        Ok(nfs) if nfs.is_empty() => println!("no reachable normal form"),
        Ok(nfs) => {
            for nf in nfs {
                println!("  ->* {nf}");
            }
        }
        Err(e) => println!("  {e}"),
    }

    println!("path with seed {seed}:");
    match calc.normalize_random(&term, seed) {
        Ok(trace) => {
            for line in trace.lines() {
                println!("  {line}");
            }
        }
        Err(e) => println!("  {e}"),
    }

    match calc.max_steps(&term) {
        Ok(n) => println!("longest path: {n} steps"),
        Err(e) => println!("longest path: {e}"),
    }
}
