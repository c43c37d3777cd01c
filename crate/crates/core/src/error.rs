use thiserror::Error;

/// Errors produced by model assembly, analysis and I/O parsing.
#[derive(Debug, Error)]
pub enum Error {
    /// Parameter validation failed; one message per violated invariant.
    #[error("invalid parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("config error (line {line}): {message}")]
    Config { line: usize, message: String },

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("unknown basis label {0}")]
    UnknownLabel(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Domain violation of a single operation (poles, NaN inputs, ...).
    #[error("{0}")]
    Domain(String),
}

impl Error {
    /// Exit code the CLI maps this error to (1 computation, 2 configuration).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidParams(_) => 2,
            _ => 1,
        }
    }
}
