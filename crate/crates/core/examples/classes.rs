//! Equivalence classes of terms under the isomorphism-induced rules.
//!
//!   cargo run --example classes

use isolambda::{parse_term, Calculus};

fn main() {
    let calc = Calculus::standard();
    for src in [r"\x:A. x + x", r"(r:A + s:B) t:C", r"pi[A](r:A + s:B)"] {
        let term = parse_term(src).unwrap();
        let class = calc.enumerate_class(&term).unwrap();
        println!("[{term}]: {} members, representative {}", class.members.len(), class.representative);
        for m in class.members.iter().take(8) {
            println!("  {m}");
        }
        if class.members.len() > 8 {
            println!("  ...");
        }
    }

    // Single rule applications, with their names and directions.
    let t = parse_term(r"\x:A. (r:B + s:C)").unwrap();
    for step in calc.equiv_step(&t) {
        println!("{step}");
    }

    let (a, b) = (parse_term(r"(\x:A. r:B) + \x:A. s:C").unwrap(), parse_term(r"\x:A. s:C + r:B").unwrap());
    println!("{a} ≡* {b}: {}", calc.equiv_star(&a, &b).unwrap());
}
