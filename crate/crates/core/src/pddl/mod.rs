//! STRIPS subset of PDDL: `:strips`, `:typing` and `:negative-preconditions`.
//!
//! Identifiers are case-insensitive and stored lowercased. Printing is
//! canonical (declaration order, one clause per line) so that
//! `parse(print(x)) == x` and equal values print byte-identically.

mod ground;
mod model;
mod parse;
mod print;
pub mod sexpr;
mod validate;

use thiserror::Error;

pub use ground::{ground, instantiate};
pub use model::*;
pub use parse::{parse_domain, parse_plan, parse_problem, validate_domain, validate_problem};
pub use print::{print_domain, print_problem};
pub use validate::{validate_plan, ValidationResult};

pub use validate::{apply, holds};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PddlError {
    #[error("syntax error at {line}:{col}: expected {expected}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
    },
    #[error("unsupported PDDL feature `{0}`")]
    UnsupportedFeature(String),
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("duplicate declaration of `{0}`")]
    DuplicateName(String),
    #[error("`{predicate}` takes {expected} argument(s), found {found}")]
    ArityMismatch {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("variable `{variable}` is not a parameter of action `{action}`")]
    UnboundVariable { action: String, variable: String },
    #[error("action `{action}` both adds and deletes {atom}")]
    ContradictoryEffect { action: String, atom: String },
    #[error("type `{0}` is part of a cycle")]
    TypeCycle(String),
    #[error("constant `{constant}` has type `{found}`, expected `{expected}`")]
    TypeMismatch {
        constant: String,
        expected: String,
        found: String,
    },
    #[error("negative literal {0} in :init")]
    NegativeInit(String),
    #[error("problem is for domain `{found}`, expected `{expected}`")]
    DomainMismatch { expected: String, found: String },
}

/// The kitchen domain shipped with the crate.
pub const KITCHEN_DOMAIN: &str = include_str!("../../data/kitchen.pddl");

/// Parsed [`KITCHEN_DOMAIN`].
pub fn kitchen_domain() -> Domain {
    parse_domain(KITCHEN_DOMAIN).expect("shipped kitchen domain parses")
}
