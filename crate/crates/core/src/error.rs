use thiserror::Error;

use crate::spec::SpecError;
use crate::statistical::StatError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("at point {point:?}: {source}")]
    Point {
        point: Vec<f64>,
        #[source]
        source: StatError,
    },
    #[error("unknown builtin '{0}'")]
    UnknownBuiltin(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Errors caused by the input definition rather than by the environment.
    pub fn is_spec_error(&self) -> bool {
        matches!(self, Error::Spec(_) | Error::Point { .. } | Error::UnknownBuiltin(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
