use thiserror::Error;

/// Errors raised across the approximation, gain and simulation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge after {evaluations} evaluations (best estimate {estimate:e}, error estimate {error:e})")]
    QuadratureFailure {
        estimate: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("eigensolver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("right inverse is invalid: D_n * D_n0 deviates from the identity by {deviation:e}")]
    InvalidRightInverse { deviation: f64 },

    #[error("system is not exponentially stable: largest eigenvalue {max_eigenvalue:e}")]
    NotHurwitz { max_eigenvalue: f64 },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("simulation budget exceeded: {steps} steps requested (limit {limit})")]
    Budget { steps: u64, limit: u64 },

    #[error("resolution n = {n}: {source}")]
    AtResolution {
        n: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
