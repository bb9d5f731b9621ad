//! Error type shared by all modules.

use thiserror::Error;

/// Errors raised by validated operations.
#[derive(Debug, Error)]
pub enum Error {
    /// Input contains NaN/Inf or violates a numeric precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Matrix or frame dimensions are incompatible.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Geometry outside the supported regime (e.g. Grassmann with T < 2k).
    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    /// Symbol pair indistinguishable in the active channel metric.
    #[error("degenerate pair: {0}")]
    DegeneratePair(String),

    /// Codebook contains (near-)duplicate symbols or is otherwise unusable.
    #[error("degenerate code: {0}")]
    DegenerateCode(String),

    /// Codebook file could not be parsed.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// Codebook file parsed but violates an invariant; names the symbol.
    #[error("validation error{}: {message}", symbol.map(|s| format!(" (symbol {s})")).unwrap_or_default())]
    Validation {
        symbol: Option<usize>,
        message: String,
    },

    /// I/O failure while reading or writing artifacts.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}
