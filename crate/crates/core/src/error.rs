use thiserror::Error;

/// Errors surfaced by the numerical kernels.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("convergence failure in {context}: best estimate {best:e}, error estimate {err:e}")]
    Convergence {
        context: String,
        best: f64,
        err: f64,
    },
    #[error("eigensolver failure: {0}")]
    Eigen(String),
    #[error("frequency too close to bound-state pole at {pole}")]
    PoleProximity { pole: f64 },
    #[error("overflow/underflow out of representable range: {0}")]
    Range(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cache i/o error: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
