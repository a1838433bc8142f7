//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the volmetrics library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    /// A field or date could not be parsed.
    #[error("parse: {0}")]
    Parse(String),

    /// Input violates a documented precondition.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Not enough observations to run the requested computation.
    #[error("insufficient data: {0}")]
    Insufficient(String),

    /// The design matrix is (numerically) rank deficient.
    #[error("rank deficient design: {0}")]
    RankDeficient(String),

    /// A numerical routine failed (negative variance, singular system, ...).
    #[error("numeric: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
