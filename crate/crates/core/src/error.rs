use thiserror::Error;

/// Errors raised by the numerical routines and the file/config layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("function cannot be resampled: {0}")]
    Resampling(String),

    #[error("tail cannot be bounded: {0}")]
    TailUnbounded(String),

    #[error("no convergence at l = {ell}: {detail}")]
    NonConvergence { ell: usize, detail: String },

    #[error("singular frame spectrum: G_{ell} = {value:e} is below the invertibility tolerance")]
    SingularSpectrum { ell: usize, value: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("band limit mismatch: {0}")]
    BandLimit(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
