//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by detector construction, calibration, streams, and the
/// experiment harness.
#[derive(Debug, Error)]
pub enum EcddError {
    /// Invalid configuration (parameter out of range, inconsistent spec).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Requested (lambda, arl0) pair has no calibration table entry.
    #[error("no calibration entry for lambda={lambda}, arl0={arl0}")]
    MissingEntry { lambda: f64, arl0: f64 },

    /// Invalid input value (e.g. an error bit outside {0,1}).
    #[error("invalid input: {0}")]
    Input(String),

    /// Operation called in a state that does not permit it.
    #[error("usage error: {0}")]
    Usage(String),

    /// Control-limit search could not bracket or converge on the target.
    #[error("control-limit search failed: {0}")]
    Search(String),

    /// Least-squares fit failed (rank-deficient design, degenerate grid).
    #[error("polynomial fit failed: {0}")]
    Fit(String),

    /// Malformed record in an input file; `line` is 1-based.
    #[error("{path}:{line}: {msg}")]
    Malformed {
        path: String,
        line: u64,
        msg: String,
    },

    /// I/O failure with the offending path attached.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Parse failure (config files, table files, stdin bits).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, EcddError>;

impl EcddError {
    /// Process exit code for the CLI: distinct codes per failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            EcddError::Config(_) | EcddError::MissingEntry { .. } | EcddError::Usage(_) => 2,
            EcddError::Io { .. } => 3,
            EcddError::Input(_) | EcddError::Malformed { .. } | EcddError::Parse(_) => 4,
            EcddError::Search(_) | EcddError::Fit(_) => 5,
        }
    }
}
