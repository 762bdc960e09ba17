//! The size S, potential P and combined measure M. S changes along `≡`;
//! P and M do not.
//!
//!   cargo run --example measures

use isolambda::measures::triple;
use isolambda::{parse_term, Calculus};

fn main() {
    let calc = Calculus::standard();
    let t = parse_term(r"\x:A. x + x").unwrap();
    let m = triple(&t);
    println!("{t}: S = {} P = {} M = {}", m.s, m.p, m.m);
    for step in calc.equiv_step(&t) {
        let n = triple(&step.result);
        println!("  {} -> {}: S = {} P = {} M = {}", step.rule, step.result, n.s, n.p, n.m);
    }
    let class = calc.enumerate_class(&parse_term(r"(\x:A. (r:B + s:C)) (u:A + w:D)").unwrap()).unwrap();
    let ms: std::collections::BTreeSet<u64> = class.members.iter().map(|x| triple(x).m).collect();
    println!("M over a class of {} members: {ms:?}", class.members.len());
}
