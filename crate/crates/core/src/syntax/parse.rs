//! Concrete syntax.
//!
//! ```text
//! type    ::= conj ('->' type)?
//! conj    ::= tatom (('/\' | '&') tatom)*
//! tatom   ::= IDENT | '(' type ')'
//! term    ::= app ('+' app)*
//! app     ::= atom* lambda? (at least one)
//! lambda  ::= '\' IDENT ':' type '.' term
//! atom    ::= IDENT (':' type)? | 'pi' '[' type ']' '(' term ')' | '(' term ')'
//! program ::= ('atoms' IDENT* ';')? term
//! ```
//!
//! `--` starts a line comment. A bound occurrence may omit its annotation and
//! inherits the binder's; a free occurrence must be annotated.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use super::{Ident, Term, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(Ident),
    Lambda,
    Colon,
    Dot,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Plus,
    Arrow,
    And,
    Semi,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(x) => format!("identifier `{x}`"),
            Tok::Lambda => "`\\`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::And => "`/\\`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

fn error_at(src: &str, offset: usize, message: impl Into<String>) -> ParseError {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.chars().count(), |i| before[i + 1..].chars().count()) + 1;
    ParseError {
        offset,
        line,
        column,
        message: message.into(),
    }
}

impl<'a> Lexer<'a> {
    fn run(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer { src, toks: Vec::new() };
        let mut it = src.char_indices().peekable();
        while let Some(&(i, c)) = it.peek() {
            let rest = &src[i..];
            if c.is_whitespace() {
                it.next();
                continue;
            }
            if rest.starts_with("--") {
                while let Some(&(_, c)) = it.peek() {
                    if c == '\n' {
                        break;
                    }
                    it.next();
                }
                continue;
            }
            let (tok, len) = if rest.starts_with("->") {
                (Tok::Arrow, 2)
            } else if rest.starts_with("/\\") {
                (Tok::And, 2)
            } else {
                match c {
                    '\\' | 'λ' => (Tok::Lambda, c.len_utf8()),
                    ':' => (Tok::Colon, 1),
                    '.' => (Tok::Dot, 1),
                    '(' => (Tok::LParen, 1),
                    ')' => (Tok::RParen, 1),
                    '[' => (Tok::LBrack, 1),
                    ']' => (Tok::RBrack, 1),
                    '+' => (Tok::Plus, 1),
                    '&' | '∧' => (Tok::And, c.len_utf8()),
                    '⇒' | '→' => (Tok::Arrow, c.len_utf8()),
                    ';' => (Tok::Semi, 1),
                    c if c.is_ascii_alphabetic() => {
                        let end = rest
                            .char_indices()
                            .find(|&(_, c)| !(c.is_ascii_alphanumeric() || c == '_' || c == '\''))
                            .map_or(rest.len(), |(j, _)| j);
                        (Tok::Ident(Arc::from(&rest[..end])), end)
                    }
                    c => return Err(error_at(src, i, format!("unexpected character `{c}`"))),
                }
            };
            lx.toks.push((tok, i));
            while let Some(&(j, _)) = it.peek() {
                if j >= i + len {
                    break;
                }
                it.next();
            }
        }
        lx.toks.push((Tok::Eof, lx.src.len()));
        Ok(lx.toks)
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    scope: Vec<(Ident, Type)>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        Ok(Parser {
            src,
            toks: Lexer::run(src)?,
            pos: 0,
            scope: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(error_at(self.src, self.offset(), msg))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {}, found {}", tok.describe(), self.peek().describe()))
        }
    }

    fn ident(&mut self) -> Result<Ident, ParseError> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(x)
            }
            other => self.err(format!("expected identifier, found {}", other.describe())),
        }
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let lhs = self.conj()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            Ok(Type::arrow(lhs, self.ty()?))
        } else {
            Ok(lhs)
        }
    }

    fn conj(&mut self) -> Result<Type, ParseError> {
        let mut acc = self.type_atom()?;
        while *self.peek() == Tok::And {
            self.bump();
            acc = Type::conj(acc, self.type_atom()?);
        }
        Ok(acc)
    }

    fn type_atom(&mut self) -> Result<Type, ParseError> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(Type::Atom(x))
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => self.err(format!("expected a type, found {}", other.describe())),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.app()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            acc = Term::sum(acc, self.app()?);
        }
        Ok(acc)
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::LParen)
    }

    fn app(&mut self) -> Result<Term, ParseError> {
        let mut acc: Option<Term> = None;
        loop {
            if *self.peek() == Tok::Lambda {
                let lam = self.lambda()?;
                return Ok(match acc {
                    Some(f) => Term::app(f, lam),
                    None => lam,
                });
            }
            if !self.starts_atom() {
                break;
            }
            let a = self.atom()?;
            acc = Some(match acc {
                Some(f) => Term::app(f, a),
                None => a,
            });
        }
        match acc {
            Some(t) => Ok(t),
            None => self.err(format!("expected a term, found {}", self.peek().describe())),
        }
    }

    fn lambda(&mut self) -> Result<Term, ParseError> {
        self.expect(Tok::Lambda)?;
        let x = self.ident()?;
        self.expect(Tok::Colon)?;
        let ty = self.ty()?;
        self.expect(Tok::Dot)?;
        self.scope.push((x.clone(), ty.clone()));
        let body = self.term();
        self.scope.pop();
        Ok(Term::lam_raw(x, ty, body?))
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Ident(x) if &*x == "pi" && *self.peek_at(1) == Tok::LBrack => {
                self.bump();
                self.bump();
                let ty = self.ty()?;
                self.expect(Tok::RBrack)?;
                self.expect(Tok::LParen)?;
                let body = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(Term::proj(ty, body))
            }
            Tok::Ident(x) => {
                self.bump();
                let ann = if *self.peek() == Tok::Colon {
                    self.bump();
                    Some(self.ty()?)
                } else {
                    None
                };
                let bound = self.scope.iter().rev().position(|(y, _)| *y == x);
                match (bound, ann) {
                    (Some(i), ann) => {
                        let ty = ann.unwrap_or_else(|| self.scope[self.scope.len() - 1 - i].1.clone());
                        Ok(Term::bound(i as u32, ty))
                    }
                    (None, Some(ty)) => Ok(Term::free_ident(x, ty)),
                    (None, None) => Err(error_at(
                        self.src,
                        at,
                        format!("free variable `{x}` needs a type annotation"),
                    )),
                }
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => self.err(format!("expected a term, found {}", other.describe())),
        }
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.err(format!("unexpected {}", self.peek().describe()))
        }
    }
}

pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// A source file: an optional atom declaration and one term.
#[derive(Debug, Clone)]
pub struct Program {
    pub atoms: Option<Vec<Ident>>,
    pub term: Term,
}

impl Program {
    /// Checks every annotation against `alphabet`.
    pub fn check_atoms(&self, alphabet: &[Ident]) -> Result<(), String> {
        let mut used = BTreeSet::new();
        for (_, _, sub) in self.term.positions() {
            match sub.kind() {
                super::TermKind::Free(_, ty)
                | super::TermKind::Bound(_, ty)
                | super::TermKind::Lam(_, ty, _)
                | super::TermKind::Proj(ty, _) => ty.atoms(&mut used),
                _ => {}
            }
        }
        match used.iter().find(|a| !alphabet.contains(a)) {
            Some(a) => Err(format!("atom `{a}` is not declared")),
            None => Ok(()),
        }
    }
}

pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(src)?;
    let mut atoms = None;
    if matches!(p.peek(), Tok::Ident(x) if &**x == "atoms") && !matches!(p.peek_at(1), Tok::Colon) {
        p.bump();
        let mut names = Vec::new();
        while let Tok::Ident(x) = p.peek().clone() {
            p.bump();
            names.push(x);
        }
        p.expect(Tok::Semi)?;
        atoms = Some(names);
    }
    let body_at = p.offset();
    let term = p.term()?;
    p.finish()?;
    let prog = Program { atoms, term };
    if let Some(alphabet) = &prog.atoms {
        prog.check_atoms(alphabet).map_err(|m| error_at(src, body_at, m))?;
    }
    Ok(prog)
}
