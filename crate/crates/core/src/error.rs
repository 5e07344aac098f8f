use thiserror::Error;

use crate::special::QuadError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("s out of (0,1): {0}")]
    InvalidOrder(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid exterior datum: {0}")]
    InvalidDatum(String),
    #[error("invalid configuration key `{key}`: {message}")]
    InvalidConfig { key: String, message: String },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("not a boundary point: ({0}, {1})")]
    NotBoundaryPoint(f64, f64),
    #[error("divergent tail: {0}")]
    DivergentTail(String),
    #[error("mismatched inputs: {0}")]
    Mismatch(String),
    #[error("no vertical window at the {0} boundary")]
    NoVerticalWindow(&'static str),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("window out of range: {0}")]
    WindowOutOfRange(String),
    #[error("solver failure{}: {message}", .t.map(|t| format!(" at t = {t}")).unwrap_or_default())]
    Solver { t: Option<f64>, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
