//! A typed λ-calculus in which isomorphic types are identified.
//!
//! Types are quotiented by commutativity and associativity of `/\`,
//! distributivity of `->` over `/\`, and currying. Terms follow suit: `+`
//! builds conjunctions, `pi[A](t)` projects by type (so it can be
//! non-deterministic), and reduction happens modulo a term equivalence that
//! mirrors the type isomorphisms.
//!
//! The crate is organised bottom-up:
//!
//! - [`syntax`]: types, terms, parsing, printing, substitution;
//! - [`type_canon`]: canonical forms and the decision procedure for `≡`;
//! - [`typing`]: type inference and the generation lemmas;
//! - [`measures`]: the size-like measures `S`, `P`, `M`;
//! - [`term_equiv`]: one-step equivalence and finite equivalence classes;
//! - [`reduction`]: reduction modulo equivalence, normal forms, traces;
//! - [`analysis`]: random typed terms and executable meta-theorems;
//! - [`encodings`]: pairs, lists, and booleans built from the calculus;
//! - [`cli`]: the `isolambda` command line.

pub mod analysis;
pub mod cli;
pub mod encodings;
pub mod measures;
pub mod reduction;
pub mod syntax;
pub mod term_equiv;
pub mod type_canon;
pub mod typing;

pub use syntax::{parse_program, parse_term, parse_type, Path, Term, TermKind, Type};
pub use term_equiv::{Calculus, Config};
pub use type_canon::{CanonicalType, Mode};
