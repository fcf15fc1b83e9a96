//! Error types shared across the crate.
//!
//! Three failure classes map onto the CLI exit codes: usage errors (1),
//! malformed input (2), and internal consistency faults (3). Library code
//! reports recoverable problems through [`HmmsbError`]; violations of
//! internal invariants (e.g. a sufficient-statistics underflow) are bugs and
//! abort via panic so they can never be silently clamped.

use std::path::PathBuf;
use thiserror::Error;

/// An internal consistency violation detected at run time.
///
/// Produced by explicit verification passes such as `recount-check`. Hot-path
/// invariant violations panic instead; the CLI maps both onto exit code 3.
#[derive(Debug, Error)]
#[error("internal consistency fault: {0}")]
pub struct Fault(pub String);

#[derive(Debug, Error)]
pub enum HmmsbError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("{path}:{line}: {message}")]
    MalformedInput {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("malformed input in {path}: {message}")]
    MalformedFile { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Fault(#[from] Fault),
}

impl HmmsbError {
    /// Exit code the CLI should terminate with for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            HmmsbError::Usage(_) | HmmsbError::Config(_) => 1,
            HmmsbError::MalformedInput { .. }
            | HmmsbError::MalformedFile { .. }
            | HmmsbError::Io { .. } => 2,
            HmmsbError::Fault(_) => 3,
        }
    }

    pub fn malformed(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        HmmsbError::MalformedInput {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HmmsbError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, HmmsbError>;
