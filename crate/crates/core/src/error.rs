//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by parsing, configuration checks, and the estimators.
///
/// The CLI maps these onto exit codes: input problems (`Parse`, `Config`,
/// `Empty`, `Io`) exit 1, numerical/degenerate failures (`Degenerate`,
/// `EnsembleFailures`) exit 2.
#[derive(Debug, Error)]
pub enum Error {
    /// A record could not be parsed; `line` is 1-based.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A price violated the positivity invariant.
    #[error("line {line}: non-positive price {price}")]
    NonPositivePrice { line: usize, price: f64 },

    /// Timestamps moved backwards by more than the configured tolerance.
    #[error("line {line}: timestamp decreases by {by_seconds} s (tolerance {tolerance_seconds} s)")]
    DecreasingTimestamp {
        line: usize,
        by_seconds: i64,
        tolerance_seconds: i64,
    },

    /// A parameter or configuration invariant was violated.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The input admits no meaningful estimate (constant series, all-zero
    /// fluctuations, zero variance, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Nothing to work on.
    #[error("empty input: {0}")]
    Empty(String),

    /// Too many surrogate pipelines failed for the ensemble to be trusted.
    #[error("{failed} of {total} surrogate pipelines failed (abort threshold {threshold})")]
    EnsembleFailures {
        failed: usize,
        total: usize,
        threshold: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
