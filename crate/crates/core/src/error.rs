use thiserror::Error;

/// Errors surfaced by every computation in the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or inconsistent input (bad permutation, non-homomorphic action, ...).
    #[error("invalid argument: {0}")]
    Argument(String),
    /// Input that is well formed but outside the mathematical domain of the tool.
    #[error("{0}")]
    Domain(String),
    /// A configured size cap was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    /// A consistency audit failed; always indicates a bug.
    #[error("internal error: {0}")]
    Internal(String),
    /// JSON input could not be parsed.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Argument(_) | Error::Domain(_) | Error::Parse { .. } => 2,
            Error::Resource(_) => 4,
            Error::Internal(_) => 1,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
