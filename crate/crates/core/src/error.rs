use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input. For text formats `line` is a 1-based line number,
    /// for binary formats it is the 1-based record index (0 for the header).
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate token {token:?} at line {line}")]
    DuplicateToken { token: String, line: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("word {word:?} not in vocabulary")]
    MissingWord { word: String },

    #[error("requested {requested} components but numerical rank is {available}")]
    RankDeficient { requested: usize, available: usize },

    #[error("cosine similarity undefined for zero vector")]
    UndefinedSimilarity,

    #[error("expected unit vector, got norm {norm}")]
    NotUnit { norm: f64 },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), line, message: message.into() }
    }

    /// True when the error points at bad user input (files, word lists,
    /// vocabulary) rather than a numerical failure inside the pipeline.
    pub fn is_user_input(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Parse { .. }
                | Error::DuplicateToken { .. }
                | Error::EmptyInput
                | Error::MissingWord { .. }
                | Error::InvalidInput(_)
        )
    }
}
