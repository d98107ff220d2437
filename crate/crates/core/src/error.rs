use std::path::PathBuf;

use crate::stable_process::PlanarPath;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular point: {0}")]
    Singularity(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("value {value} outside available range [{low}, {high}]")]
    Range { value: f64, low: f64, high: f64 },

    #[error("precision error: {0}")]
    Precision(String),

    #[error("quadrature failed to converge on [{a}, {b}] (estimate {estimate:e}, error {error:e})")]
    Quadrature { a: f64, b: f64, estimate: f64, error: f64 },

    #[error("path budget of {budget} points exhausted at t = {}", .partial.horizon())]
    PathBudget { budget: usize, partial: Box<PlanarPath> },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
