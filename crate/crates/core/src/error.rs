use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    /// A record line did not match the expected schema.
    #[error("{}:{line}: {message}", path.display())]
    Schema {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unrecognized optimization flag `{0}`")]
    UnknownOptFlag(String),

    #[error("function name `{0}` does not occur as an identifier in the code")]
    FunctionNameAbsent(String),

    #[error("cannot split corpus: {0}")]
    Split(String),

    #[error("subsample fraction must be in (0, 1], got {0}")]
    InvalidFraction(f64),

    #[error("language identification needs non-empty text")]
    EmptyText,

    #[error("language identifier backend failed: {0}")]
    LanguageBackend(String),

    #[error("predictions reference unknown sample ids: {}", .0.join(", "))]
    UnknownSampleIds(Vec<String>),

    #[error("sample `{0}` has more than one prediction")]
    DuplicatePrediction(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
