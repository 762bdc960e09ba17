//! The binary, driven as a user would.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_isolambda"));
    c.current_dir(env!("CARGO_MANIFEST_DIR"));
    c.env_remove("ISOLAMBDA_FUEL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, src: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("isolambda-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, src).unwrap();
    p
}

#[test]
fn typecheck_prints_the_type() {
    let o = run(&["typecheck", "examples/ex1.lam"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), ": A\n");
}

#[test]
fn golden_json() {
    for f in ["ex1", "ex2", "ex2_same", "ex3", "ex4", "ex4_applied", "ex5", "ex6"] {
        let file = format!("examples/{f}.lam");
        let mut got = stdout(&run(&["--json", "typecheck", &file]));
        got += &stdout(&run(&["--json", "reduce", "--all", &file]));
        let golden = std::fs::read_to_string(format!("{}/tests/golden/{f}.json", env!("CARGO_MANIFEST_DIR"))).unwrap();
        assert_eq!(got, golden, "{f}");
        for line in got.lines() {
            serde_json::from_str::<serde_json::Value>(line).expect("valid json");
        }
    }
}

#[test]
fn deterministic_mode_has_fewer_results() {
    let all = stdout(&run(&["reduce", "--all", "examples/ex2_same.lam"]));
    let det = stdout(&run(&["--deterministic", "reduce", "--all", "examples/ex2_same.lam"]));
    assert_eq!(all.lines().count(), 2);
    assert_eq!(det, "r:A\n");
}

#[test]
fn seeded_reduction_is_reproducible() {
    let args = ["reduce", "--seed", "5", "--trace", "examples/ex3.lam"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let last = text.lines().last().unwrap();
    // The last line is a reduction step (not an indented equivalence).
    assert!(!last.starts_with(' ') && last.ends_with(": r:A"), "{text}");
    let json = stdout(&run(&["--json", "reduce", "--seed", "5", "examples/ex3.lam"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["end"], "r:A");
    for step in v["steps"].as_array().unwrap() {
        for key in ["rule", "position", "term"] {
            assert!(step[key].is_string(), "{step}");
        }
    }
}

#[test]
fn errors_and_exit_codes() {
    let bad_type = scratch("bad.lam", "atoms A B;\n(\\x:A. x) y:B\n");
    let o = run(&["typecheck", bad_type.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("type error at /"));

    let bad_syntax = scratch("syntax.lam", "(\\x:A x)\n");
    let o = run(&["typecheck", bad_syntax.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("syntax.lam:1:"));

    let undeclared = scratch("atoms.lam", "atoms A;\nx:B\n");
    assert_eq!(run(&["typecheck", undeclared.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(run(&["--atoms", "C", "typecheck", "examples/ex1.lam"]).status.code(), Some(1));
    assert!(run(&["--atoms", "A,B", "typecheck", "examples/ex1.lam"]).status.success());

    assert_eq!(run(&["typecheck", "missing.lam"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["reduce", "--trace", "examples/ex1.lam"]).status.code(), Some(2));
    assert_eq!(run(&["prop", "no_such_property"]).status.code(), Some(2));
}

#[test]
fn fuel_from_the_environment() {
    let o = bin()
        .args(["reduce", "--all", "examples/ex3.lam"])
        .env("ISOLAMBDA_FUEL", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("fuel exhausted"));
    assert!(run(&["reduce", "--all", "--fuel", "1000", "examples/ex3.lam"]).status.success());
}

#[test]
fn unreachable_normal_forms_are_an_error() {
    let o = run(&["reduce", "--all", "examples/ex5_applied.lam"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
}

#[test]
fn class_and_measure() {
    let o = stdout(&run(&["class", "examples/ex4_applied.lam"]));
    assert!(o.starts_with("representative: "));
    let v: serde_json::Value = serde_json::from_str(&stdout(&run(&["--json", "class", "examples/ex4_applied.lam"]))).unwrap();
    assert_eq!(v["size"].as_u64().unwrap() as usize, v["members"].as_array().unwrap().len());

    let m = scratch("m.lam", "\\x:A. x + x\n");
    assert_eq!(stdout(&run(&["measure", m.to_str().unwrap()])), "S = 3\nP = 1\nM = 4\n");
}

#[test]
fn prop_and_demo() {
    let o = run(&["prop", "unicity", "--trials", "10", "--seed", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("unicity: 10 trials"));
    let o = run(&["demo", "booleans"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("normal forms: {r:B}") && text.contains("normal forms: {s:B}"), "{text}");
}
