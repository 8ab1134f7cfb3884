use thiserror::Error;

/// Errors produced by graph loading, sampling and mining.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input that could not be parsed at all.
    #[error("parse error: {0}")]
    Parse(String),

    /// Structurally well-formed input that violates a graph invariant.
    /// The message names the offending element.
    #[error("validation error: {0}")]
    Validation(String),

    /// No length-l path exists in the graph.
    #[error("no length-{l} path exists in the graph")]
    NoPath { l: usize },

    /// The path sampler exceeded its budget of consecutive rejected walks,
    /// which signals a graph dominated by non-simple walks.
    #[error("rejection budget exhausted after {budget} consecutive rejected walks")]
    RejectionBudget { budget: u64 },

    /// A caller-side precondition was violated (bad argument).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A numeric input is outside its legal domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
