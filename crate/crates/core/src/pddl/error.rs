use std::fmt;

use super::lexer::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PddlErrorCode {
    Lexical,
    Unbalanced,
    UnknownRequirement,
    UnsupportedFeature,
    Syntax,
    UndeclaredType,
    UndeclaredFluent,
    UndeclaredObject,
    /// Well-formed text describing an ill-formed model.
    Semantic,
}

impl PddlErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            PddlErrorCode::Lexical => "lexical-error",
            PddlErrorCode::Unbalanced => "unbalanced-parens",
            PddlErrorCode::UnknownRequirement => "unknown-requirement",
            PddlErrorCode::UnsupportedFeature => "unsupported-feature",
            PddlErrorCode::Syntax => "syntax-error",
            PddlErrorCode::UndeclaredType => "undeclared-type",
            PddlErrorCode::UndeclaredFluent => "undeclared-fluent",
            PddlErrorCode::UndeclaredObject => "undeclared-object",
            PddlErrorCode::Semantic => "semantic-error",
        }
    }
}

impl fmt::Display for PddlErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A codec failure with the location it was detected at.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {code}: {message}")]
pub struct PddlError {
    pub code: PddlErrorCode,
    pub message: String,
    pub span: Span,
}

impl PddlError {
    pub fn new(code: PddlErrorCode, message: impl Into<String>, span: Span) -> Self {
        PddlError {
            code,
            message: message.into(),
            span,
        }
    }

    /// `file:line:col: code: message`
    pub fn render(&self, file: &str) -> String {
        format!("{file}:{self}")
    }
}
