use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("unsupported encoding: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("interval [{start}, {end}) out of range for axis of extent {extent}")]
    Bounds {
        start: usize,
        end: usize,
        extent: usize,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("data error: {0}")]
    Data(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end.
    ///
    /// 1 usage/config, 2 I/O, 3 data/format.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Precondition(_) => 1,
            Error::Io { .. } => 2,
            Error::Format(_)
            | Error::Unsupported(_)
            | Error::Bounds { .. }
            | Error::Shape(_)
            | Error::Data(_) => 3,
        }
    }
}
