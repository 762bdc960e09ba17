//! Run a property suite over randomly generated well-typed terms.
//!
//!   cargo run --release --example properties [-- NAME [TRIALS [SEED]]]

use isolambda::analysis::{gen_typed_term, run_property_suite, GenConfig, PROPERTIES};
use isolambda::typing::infer;

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next();
    let trials = args.next().map_or(50, |s| s.parse().expect("trials"));
    let seed = args.next().map_or(42, |s| s.parse().expect("seed"));

    println!("sample terms:");
    for i in 0..5 {
        let t = gen_typed_term(&GenConfig::with_seed(seed + i));
        println!("  {t} : {}", infer(&t).unwrap().ty);
    }

    let names: Vec<&str> = match &name {
        Some(n) => vec![n.as_str()],
        None => PROPERTIES.to_vec(),
    };
    for n in names {
        match run_property_suite(n, trials, seed) {
            Ok(report) => print!("{report}"),
            Err(e) => eprintln!("{e}"),
        }
    }
}
