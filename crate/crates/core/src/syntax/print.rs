use std::collections::BTreeSet;
use std::fmt::{self, Write};

use super::{Ident, Term, TermKind, Type};

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Atom(a) => f.write_str(a),
            Type::Arrow(d, c) => {
                if matches!(**d, Type::Arrow(..)) {
                    write!(f, "({d}) -> {c}")
                } else {
                    write!(f, "{d} -> {c}")
                }
            }
            Type::Conj(l, r) => {
                if matches!(**l, Type::Arrow(..)) {
                    write!(f, "({l})")?;
                } else {
                    write!(f, "{l}")?;
                }
                f.write_str(" /\\ ")?;
                if matches!(**r, Type::Atom(_)) {
                    write!(f, "{r}")
                } else {
                    write!(f, "({r})")
                }
            }
        }
    }
}

/// `base`, or `base` with primes appended until it avoids `taken`.
pub fn fresh_name(base: &str, taken: &BTreeSet<Ident>) -> Ident {
    let mut name = base.to_string();
    while taken.iter().any(|t| **t == *name) {
        name.push('\'');
    }
    Ident::from(name)
}

fn free_names(t: &Term, out: &mut BTreeSet<Ident>) {
    match t.kind() {
        TermKind::Free(x, _) => {
            out.insert(x.clone());
        }
        _ => t.children().into_iter().for_each(|c| free_names(c, out)),
    }
}

fn annotation(ty: &Type) -> String {
    match ty {
        Type::Atom(a) => a.to_string(),
        _ => format!("({ty})"),
    }
}

/// Operator context of the subterm being printed.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Sum,
    App,
    Arg,
}

struct Printer {
    out: String,
    scope: Vec<(Ident, Type)>,
}

impl Printer {
    fn go(&mut self, t: &Term, prec: Prec, tail: bool) {
        let needs_parens = match t.kind() {
            TermKind::Sum(..) => prec > Prec::Sum,
            TermKind::App(..) => prec > Prec::App,
            TermKind::Lam(..) => !tail,
            _ => false,
        };
        if needs_parens {
            self.out.push('(');
            self.go(t, Prec::Sum, true);
            self.out.push(')');
            return;
        }
        match t.kind() {
            TermKind::Free(x, ty) => {
                let _ = write!(self.out, "{x}:{}", annotation(ty));
            }
            TermKind::Bound(i, ty) => match self.scope.len().checked_sub(*i as usize + 1) {
                Some(k) => {
                    let (name, bty) = &self.scope[k];
                    if bty == ty {
                        let _ = write!(self.out, "{name}");
                    } else {
                        let _ = write!(self.out, "{name}:{}", annotation(ty));
                    }
                }
                None => {
                    let _ = write!(self.out, "#{i}:{}", annotation(ty));
                }
            },
            TermKind::Lam(hint, ty, body) => {
                let mut taken = BTreeSet::new();
                free_names(body, &mut taken);
                taken.extend(self.scope.iter().map(|(n, _)| n.clone()));
                let name = fresh_name(&hint.0, &taken);
                let _ = write!(self.out, "\\{name}:{}. ", annotation(ty));
                self.scope.push((name, ty.clone()));
                self.go(body, Prec::Sum, true);
                self.scope.pop();
            }
            TermKind::App(fun, arg) => {
                self.go(fun, Prec::App, false);
                self.out.push(' ');
                self.go(arg, Prec::Arg, tail);
            }
            TermKind::Sum(l, r) => {
                self.go(l, Prec::Sum, false);
                self.out.push_str(" + ");
                self.go(r, Prec::App, tail);
            }
            TermKind::Proj(ty, body) => {
                let _ = write!(self.out, "pi[{ty}](");
                self.go(body, Prec::Sum, true);
                self.out.push(')');
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut p = Printer {
            out: String::new(),
            scope: Vec::new(),
        };
        p.go(self, Prec::Sum, true);
        f.write_str(&p.out)
    }
}

#[cfg(test)]
mod tests {
    use crate::syntax::{parse_term, parse_type};

    #[test]
    fn types_round_trip() {
        for src in [
            "A",
            "A -> B -> C",
            "(A -> B) -> C",
            r"A /\ B",
            r"A /\ (B /\ C)",
            r"(A /\ B) /\ C",
            r"(A -> B) /\ C -> D",
            r"A -> (B /\ C)",
        ] {
            let ty = parse_type(src).unwrap();
            assert_eq!(parse_type(&ty.to_string()).unwrap(), ty, "{src}");
        }
    }

    #[test]
    fn terms_print() {
        let t = parse_term(r"\x:A. \y:B. x + y").unwrap();
        assert_eq!(t.to_string(), r"\x:A. \y:B. x + y");
        let t = parse_term(r"(\x:A. x) s:A").unwrap();
        assert_eq!(t.to_string(), r"(\x:A. x) s:A");
        let t = parse_term(r"pi[B -> A]((\x:A/\B. x) s:A) t:B").unwrap();
        assert_eq!(t.to_string(), r"pi[B -> A]((\x:(A /\ B). x) s:A) t:B");
        let t = parse_term(r"x:A + (y:A + z:A)").unwrap();
        assert_eq!(t.to_string(), "x:A + (y:A + z:A)");
        let t = parse_term(r"(\x:A. x) + y:A").unwrap();
        assert_eq!(t.to_string(), r"(\x:A. x) + y:A");
    }

    #[test]
    fn shadowing_is_renamed() {
        let t = parse_term(r"\x:A. \x:B. x").unwrap();
        assert_eq!(t.to_string(), r"\x:A. \x':B. x'");
        let t = parse_term(r"\x:A. x:B").unwrap();
        assert_eq!(t.to_string(), r"\x:A. x:B");
    }
}
