//! Neutral in-memory representation of planning domains and problems.
//!
//! Values are immutable once built; edits return new values. Every
//! observable order (fluents, ground atoms, objects) is lexicographic so
//! that serialized artifacts are reproducible.

mod edit;
mod eval;
mod expr;
mod ground;
mod model;
mod validate;

pub use edit::{apply_edit, EditError, EditOutcome, EditResult};
pub use eval::{eval_expr, eval_term, first_violated, ground_app, Binding, EvalError, StateView};
pub use expr::{Arg, CmpOp, Effect, Expr, FluentApp, NumericOp, Term};
pub use ground::{candidates, ground_atoms, instantiations, GroundAtoms};
pub use model::{
    ActionSchema, Assignment, DomainEdit, DomainModel, EditKind, FluentDecl, FluentKind,
    GroundAtom, ObjectDecl, Param, ProblemInstance, Requirements, TypeDecl, UNIVERSAL_TYPE,
};
pub use validate::{validate, validate_domain, ValidationReport, Violation, ViolationCode};

#[cfg(test)]
mod tests;
