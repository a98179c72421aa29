use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A model or configuration parameter is outside its domain.
    #[error("invalid parameter: {0}")]
    Param(String),

    /// A function argument is outside the domain where the function is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Two routes to the same statistic disagree. This is a bug, not bad input.
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    #[error("replica {replica} panicked: {message}")]
    ReplicaPanicked { replica: u32, message: String },

    #[error("cannot write to {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
