//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An operation required fitness values that were never assigned.
    #[error("individual has no fitness; evaluate the population first")]
    Unevaluated,

    #[error("value outside domain: {0}")]
    Domain(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("record schema mismatch in column `{column}`: {msg}")]
    Schema { column: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// An I/O failure annotated with the file it concerns. Display shows
    /// only the context; the underlying error surfaces through `source()`.
    #[error("{context}")]
    File {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short stable tag, used e.g. in sweep CSV rows for failed runs.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Unevaluated => "unevaluated",
            Error::Domain(_) => "domain",
            Error::LengthMismatch { .. } => "length-mismatch",
            Error::ShapeMismatch(_) => "shape-mismatch",
            Error::TooLarge(_) => "too-large",
            Error::InsufficientData(_) => "insufficient-data",
            Error::NonFinite(_) => "non-finite",
            Error::Parse { .. } => "parse",
            Error::Schema { .. } => "schema",
            Error::Io(_) => "io",
            Error::File { .. } => "file",
            Error::Csv(_) => "csv",
        }
    }
}
