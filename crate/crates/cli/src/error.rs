use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] gqc_core::Error),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("failed to parse {path}: {message}")]
    ConfigFile { path: PathBuf, message: String },

    #[error("no crossing: {metric} stays on the same side of its boundary at {endpoint} (value {value})")]
    NoCrossing {
        metric: String,
        endpoint: String,
        value: f64,
    },

    #[error("sweep failed at grid point {index} ({parameter_name} = {parameter}): {source}")]
    AtGridPoint {
        index: usize,
        parameter_name: String,
        parameter: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed sweep CSV at line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
