use thiserror::Error;

/// Errors shared by the state, metrics, channel and homodyne modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unphysical state: minimum symplectic eigenvalue {min_symplectic} is below {limit}")]
    UnphysicalState { min_symplectic: f64, limit: f64 },

    #[error("covariance matrix is asymmetric: max |V_ij - V_ji| = {max_asymmetry} exceeds {tolerance}")]
    AsymmetricInput { max_asymmetry: f64, tolerance: f64 },

    #[error("covariance diagonal entry {index} is not positive (value {value})")]
    NonPositiveDiagonal { index: usize, value: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("domain error: {reason} (value {value})")]
    Domain { value: f64, reason: String },

    #[error("dimension error: expected {expected} modes, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("index {index} out of bounds ({bound})")]
    Index { index: usize, bound: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid acquisition plan: {0}")]
    Plan(String),

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("length mismatch at line {line}: expected {expected} values, got {actual}")]
    LengthMismatch {
        line: usize,
        expected: usize,
        actual: usize,
    },

    #[error("missing data: {}", .0.join(", "))]
    MissingData(Vec<String>),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
