use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A mathematical operation was called outside its domain.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("config parse error on line {line}: {detail}")]
    Parse { line: usize, detail: String },

    #[error("invalid config: {0}")]
    Validation(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("repetition {rep} failed: {source}")]
    Repetition {
        rep: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }
}
