use thiserror::Error;

/// Errors surfaced by any part of the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("fewer than {needed} distinct target values (found {found})")]
    TooFewDistinctValues { needed: usize, found: usize },

    #[error("non-finite target value")]
    NonFiniteTarget,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("class {class} has no training points under the current discretizer")]
    MissingClass { class: usize },

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("dataset too short: need at least {needed} samples, got {got}")]
    DatasetTooShort { needed: usize, got: usize },

    #[error("column {0:?} missing from CSV header")]
    MissingColumn(String),

    #[error("unparsable value {value:?} in column {column:?} at row {row}")]
    UnparsableValue {
        row: usize,
        column: String,
        value: String,
    },

    #[error("dataset is empty after ingestion")]
    EmptyDataset,

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("empty input")]
    EmptyInput,

    #[error("length mismatch: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
