use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("invalid dimensions {rows}x{cols}: {reason}")]
    InvalidDimensions {
        rows: usize,
        cols: usize,
        reason: &'static str,
    },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("svd did not converge after {0} sweeps")]
    SvdNoConvergence(usize),

    #[error("symmetric eigensolver did not converge after {0} sweeps")]
    EigNoConvergence(usize),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive semi-definite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("zero momentum")]
    ZeroMomentum,

    #[error("zero matrix: {0}")]
    ZeroMatrix(&'static str),

    #[error("too few eigenvalues: need at least {needed}, got {got}")]
    TooFewEigenvalues { needed: usize, got: usize },

    #[error("degenerate spectrum")]
    DegenerateSpectrum,

    #[error("NaN loss at step {0}")]
    NanLoss(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
