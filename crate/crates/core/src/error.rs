use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible geometry: omega {omega:.6} + phi {phi:.6} rad reaches pi/2")]
    InfeasibleGeometry { omega: f64, phi: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid placement {index}: {reason}")]
    Placement { index: usize, reason: String },

    #[error("grid search too large: {combinations} combinations (limit {limit})")]
    GridTooLarge { combinations: f64, limit: f64 },

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
