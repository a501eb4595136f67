//! Error type shared by all library modules.

use thiserror::Error;

/// Errors produced by dataset loading, training, and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("column '{0}' not found in csv header")]
    MissingColumn(String),

    #[error("row {row}, column '{column}': cannot parse '{value}' as a finite number")]
    InvalidFeature {
        row: usize,
        column: String,
        value: String,
    },

    #[error("dataset must contain both classes (got {n_plus} positive, {n_minus} negative rows)")]
    SingleClass { n_plus: usize, n_minus: usize },

    #[error("dataset has no rows")]
    EmptyDataset,

    #[error("dataset has no feature columns")]
    NoFeatures,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{class} class has {count} rows, need at least {needed}")]
    ClassTooSmall {
        class: &'static str,
        count: usize,
        needed: usize,
    },

    #[error("no AUC improvements recorded; cannot estimate a stop parameter")]
    NoImprovements,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by malformed input (files, flags, shapes)
    /// rather than by data that is structurally valid but statistically
    /// unusable. Front ends use this to pick an exit code.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::Io(_)
            | Error::Csv(_)
            | Error::MissingColumn(_)
            | Error::InvalidFeature { .. }
            | Error::EmptyDataset
            | Error::NoFeatures
            | Error::DimensionMismatch { .. }
            | Error::InvalidParameter(_) => true,
            Error::SingleClass { .. } | Error::ClassTooSmall { .. } | Error::NoImprovements => {
                false
            }
        }
    }
}
