use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("basis mismatch: {0:?} vs {1:?}")]
    BasisMismatch(String, String),
    #[error("operator is not Hermitian (max |A - A†| = {defect:e} > {tol:e})")]
    NotHermitian { defect: f64, tol: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("time {t:e} outside [0, {duration:e}]")]
    TimeOutOfRange { t: f64, duration: f64 },
    #[error("integrator failure: {0}")]
    Integrator(String),
    #[error("convergence certificate failed: {0}")]
    Convergence(String),
    #[error("trace drift {drift:e} exceeds {tol:e}")]
    TraceDrift { drift: f64, tol: f64 },
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
