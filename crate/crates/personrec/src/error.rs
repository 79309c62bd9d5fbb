//! Crate-wide error type.

use std::path::PathBuf;

use crate::graph::UserId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A malformed input line, reported with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseIssue {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown user {0}")]
    UnknownUser(UserId),

    #[error("user {0} has no active interest profile")]
    MissingProfile(UserId),

    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("cannot split {edges} edges into {k} folds")]
    TooFewEdges { edges: usize, k: usize },

    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("{path}: {count} malformed line(s), first: {first}", path = .path.display())]
    MalformedInput {
        path: PathBuf,
        count: usize,
        first: ParseIssue,
    },

    #[error("{path}: {source}", path = .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: invalid report: {reason}", path = .path.display())]
    BadReport { path: PathBuf, reason: String },
}

impl Error {
    pub fn invalid_config(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
