//! CLI-side errors: file and format problems layered over the library's
//! numeric errors. Messages name the offending file and line.

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] gaugeword::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed line: {detail}")]
    MalformedLine {
        path: String,
        line: usize,
        detail: String,
    },

    #[error("{path}:{line}: dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch {
        path: String,
        line: usize,
        expected: usize,
        got: usize,
    },

    #[error("{path}: no embedding rows found")]
    EmptyEmbedding { path: String },

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
