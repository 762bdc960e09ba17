//! The worked examples from the calculus' presentation, checked end to end.

mod common;

use common::{example, nfs, same_modulo, t};
use isolambda::type_canon::type_equiv;
use isolambda::typing::infer;
use isolambda::{parse_type, Calculus};

fn typed(name: &str, ty: &str) -> isolambda::Term {
    let term = example(name);
    let got = infer(&term).unwrap().ty;
    assert!(type_equiv(&got, &parse_type(ty).unwrap()), "{name}: {got} vs {ty}");
    term
}

#[test]
fn projection_through_application() {
    let c = Calculus::standard();
    let term = typed("ex1", "A");
    assert!(same_modulo(&c, &nfs(&c, &term), &[t("s:A")]));
}

#[test]
fn sum_as_argument_pair() {
    let c = Calculus::standard();
    let term = typed("ex2", "A");
    assert!(same_modulo(&c, &nfs(&c, &term), &[t("r:A")]));
    let term = typed("ex2_same", "A");
    assert!(same_modulo(&c, &nfs(&c, &term), &[t("r:A"), t("s:A")]));
}

#[test]
fn projection_of_a_pair_valued_function() {
    let c = Calculus::standard();
    let term = typed("ex3", "A");
    assert!(same_modulo(&c, &nfs(&c, &term), &[t("r:A")]));
}

#[test]
fn true_false_and_tf() {
    let c = Calculus::standard();
    let term = typed("ex4", "(A -> B -> A) /\\ (A -> B -> B)");
    let tt_ff = t(r"(\x:A. \y:B. x) + \x:A. \y:B. y");
    let tf = t(r"\x:A. \y:B. x + y");
    assert!(same_modulo(&c, &nfs(&c, &term), &[tt_ff.clone(), tf.clone()]));
    // Both results are one class: they differ by dist_ii.
    assert!(c.equiv_star(&tt_ff, &tf).unwrap());
    let applied = typed("ex4_applied", "A /\\ B");
    assert!(same_modulo(&c, &nfs(&c, &applied), &[t("r:A + s:B")]));
    let tf_applied = t(r"(\x:A. \y:B. x + y) r:A s:B");
    assert!(same_modulo(&c, &nfs(&c, &tf_applied), &[t("r:A + s:B")]));
}

#[test]
fn delta_feeds_both_parameters() {
    let c = Calculus::standard();
    let term = typed("ex5", "C");
    assert!(same_modulo(&c, &nfs(&c, &term), &[t("t:C")]));
}

#[test]
fn delta_with_a_body_using_both_parameters() {
    let c = Calculus::standard();
    let term = typed("ex5_applied", "C");
    let stated = t(r"g:(((A /\ B) -> A) -> ((A /\ B) -> B) -> C)
                     (pi[(A /\ B) -> A](\z:A /\ B. z)) (pi[(A /\ B) -> B](\z:A /\ B. z))");
    let stated_rep = c.representative(&stated).unwrap();
    // The stated end point is reachable...
    let mut frontier = vec![c.representative(&term).unwrap()];
    let mut seen = std::collections::HashSet::new();
    let mut reached = false;
    while let Some(cur) = frontier.pop() {
        if !seen.insert(cur.clone()) {
            continue;
        }
        reached |= cur == stated_rep;
        frontier.extend(c.red_modulo(&cur).unwrap().into_iter().map(|s| s.representative));
    }
    assert!(reached);
    // ...but it is not normal: its two arguments merge back into λz.z.
    assert!(!c.is_normal(&stated).unwrap());
    assert!(nfs(&c, &term).is_empty());
}

#[test]
fn split_then_push_under_binder() {
    let c = Calculus::standard();
    let term = typed("ex6", "((A /\\ B) -> A) /\\ C");
    let stated = t(r"(\x:A /\ B. pi[A](x)) + r:C");
    assert!(same_modulo(&c, &nfs(&c, &term), &[stated]));
}
