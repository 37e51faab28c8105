use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("bound undefined: lambda = {lambda} must exceed d/(d+2) = {threshold} for d = {d}")]
    BoundUndefined { lambda: f64, d: usize, threshold: f64 },
    #[error("invalid quantum numbers: {0}")]
    InvalidChain(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("normalization error: {0}")]
    Normalization(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("unsupported dimension d = {d}: {reason}")]
    UnsupportedDimension { d: usize, reason: String },
    #[error("divergence: {0}")]
    Divergence(String),
    #[error("numeric nonconvergence: {0}")]
    NonConvergence(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NonConvergence(_) | Error::Divergence(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
