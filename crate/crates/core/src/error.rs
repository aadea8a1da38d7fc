use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the simulation library.
///
/// The variants are grouped so that the CLI can map them onto its exit codes:
/// configuration problems, I/O problems and numerical-invariant violations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("invalid state specification `{spec}`: {reason}")]
    StateSpec { spec: String, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed {what} at line {line}: {reason}")]
    Parse {
        what: &'static str,
        line: usize,
        reason: String,
    },

    #[error("numerical invariant violated: {0}")]
    Numerical(String),

    #[error("index {index} out of range (len {len})")]
    OutOfRange { index: usize, len: usize },

    #[error("checkpoint or lattice mismatch: {0}")]
    Mismatch(String),

    #[error("cross-correlation ⟨|G_j|²|G_l|²⟩ was not captured for ({0}, {1})")]
    CrossNotCaptured(usize, usize),

    #[error("{0}")]
    Unsupported(String),
}

impl Error {
    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 1 configuration, 2 I/O (including unreadable
    /// input files), 3 numerical-invariant violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::StateSpec { .. } | Error::Unsupported(_) => 1,
            Error::Io { .. } | Error::Parse { .. } => 2,
            Error::Numerical(_)
            | Error::OutOfRange { .. }
            | Error::Mismatch(_)
            | Error::CrossNotCaptured(..) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
