//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input had the wrong shape (window length, vector dimension, ...).
    #[error("input shape: {0}")]
    InputShape(String),

    /// An input violated a value-level contract (negative probability,
    /// non-finite sample, bad normalization, ...).
    #[error("validation: {0}")]
    Validation(String),

    /// A series was too short for the requested embedding.
    #[error("series too short: need at least {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    /// A parameter was outside its documented range.
    #[error("parameter: {0}")]
    Parameter(String),

    /// A quantifier is undefined on a single-state distribution.
    #[error("degenerate support: {0}")]
    DegenerateSupport(String),

    /// Not enough samples to fit or summarize.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The dual solver ran out of its iteration budget.
    #[error(
        "solver did not converge within {iterations} pair updates (KKT residual {residual:.3e})"
    )]
    Convergence { iterations: u64, residual: f64 },

    /// A metric needs both labels present.
    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    /// A protocol precondition failed for a specific subject.
    #[error("protocol: subject {subject}: {reason}")]
    Protocol { subject: String, reason: String },

    /// A data file could not be parsed.
    #[error("parse error at {path}:{line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },

    /// A model was used in a state it cannot serve (untrained, empty,
    /// schema mismatch).
    #[error("model state: {0}")]
    State(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
