//! Concrete syntax: the formula language and the JSON documents for models
//! and proofs.

mod formula;
mod model_doc;
mod proof_doc;

use std::fmt;

use thiserror::Error;

use crate::model::Violation;
use crate::rational::RationalError;

pub use formula::{parse_formula, parse_term, print_formula, print_term, MAX_DEPTH};
pub use model_doc::{
    model_from_doc, model_to_doc, model_to_json, natural_cmp, parse_model, FunctionDoc, ModelDoc, RelationDoc,
    SpaceDoc,
};
pub use proof_doc::{parse_proof, proof_from_doc, proof_to_doc, proof_to_json, JustDoc, ProofDoc, StepDoc};

/// Byte offsets into the parsed text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        SourceSpan { start, end }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{message} at {span}")]
    Syntax { message: String, span: SourceSpan },
    #[error("symbol `{symbol}` used with {found} arguments, earlier with {expected} at {span}")]
    Arity { symbol: String, expected: usize, found: usize, span: SourceSpan },
    #[error("{source} at {span}")]
    Rational { source: RationalError, span: SourceSpan },
}

impl ParseError {
    pub fn span(&self) -> SourceSpan {
        match self {
            ParseError::Syntax { span, .. } | ParseError::Arity { span, .. } | ParseError::Rational { span, .. } => *span,
        }
    }
}

/// Failure to read a model or proof document.
#[derive(Debug, Error)]
pub enum DocError {
    #[error("schema error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid model: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("{location}: {source}")]
    Formula { location: String, source: ParseError },
    #[error("{location}: {message}")]
    Proof { location: String, message: String },
}
