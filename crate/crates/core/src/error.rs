use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no samples in region")]
    EmptyRegion,

    #[error("invalid closed set: {0}")]
    InvalidSet(String),

    #[error("cantor depth {0} exceeds the limit of 20")]
    CantorDepth(u32),

    #[error("{what} would need {count} samples (cap {cap}); lower n or the Cantor depth")]
    SampleCap {
        what: &'static str,
        count: usize,
        cap: usize,
    },

    #[error("boundary construction failed: {0}")]
    Boundary(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("linear solve stalled at relative residual {residual:e} after {iterations} iterations")]
    LinearSolve { iterations: usize, residual: f64 },

    #[error("weld failed: {0}")]
    Weld(String),

    #[error("chart missing on vertex {0}")]
    MissingChart(usize),

    #[error("chart is not single-valued over the patch: {0}")]
    ChartNotSingleValued(String),

    #[error("plane z = {0} contains a face")]
    DegenerateSection(f64),

    #[error("{pointer}: {message}")]
    Config { pointer: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub fn config(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            pointer: pointer.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
