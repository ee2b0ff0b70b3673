//! PDDL codec: domain and problem files to and from the IR, plus plan files.
//!
//! Supported fragment: typing, negative and disjunctive preconditions and
//! numeric fluents with `increase`, `decrease` and `assign` effects.
//! Anything outside it fails with `unsupported-feature` instead of being
//! silently dropped.

mod emit;
mod error;
mod lexer;
mod parse;
mod plan;

pub use emit::{emit_domain, emit_problem};
pub use error::{PddlError, PddlErrorCode};
pub use lexer::{PddlText, Sexpr, Span, Token, TokenKind};
pub use parse::{
    parse_domain, parse_domain_text, parse_effect, parse_effects, parse_expr, parse_problem,
    parse_problem_text, parse_term,
};
pub use plan::parse_plan;
