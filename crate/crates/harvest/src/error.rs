use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ultraviolet divergent configuration: {0}")]
    UvDivergent(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("quadrature did not converge (partial value {value}, error estimate {abs_err:e})")]
    NonConvergence { value: Complex64, abs_err: f64 },
    #[error("regime not supported: {0}")]
    RegimeUnsupported(String),
    #[error("state is not physical: 1 - L_AA - L_BB = {0:e}")]
    Unphysical(f64),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
