use std::path::PathBuf;

use thiserror::Error;

/// Malformed input text, located by 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum JobError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", source.name())]
    Module {
        #[from]
        source: duality_lab::Error,
    },
    #[error("usage: {0}")]
    Usage(String),
}

impl JobError {
    /// `2` for unusable input, `3` for a failed computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            JobError::Parse(_) | JobError::Io { .. } | JobError::Usage(_) => 2,
            JobError::Module { .. } => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        JobError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<csv::Error> for JobError {
    fn from(e: csv::Error) -> Self {
        let source = match e.into_kind() {
            csv::ErrorKind::Io(io) => io,
            other => std::io::Error::other(format!("{other:?}")),
        };
        JobError::Io {
            path: PathBuf::from("<csv>"),
            source,
        }
    }
}
