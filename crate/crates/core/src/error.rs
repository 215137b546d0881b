use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot normalize a zero vector")]
    ZeroVector,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("simplex made no progress after {iterations} iterations")]
    NumericalBreakdown { iterations: usize },

    #[error("NoFeasibleSeparator: no halfspace through the origin separates the sample")]
    NoFeasibleSeparator,

    #[error("NoCandidate: every realizable-oracle call returned none")]
    NoCandidate,

    #[error("feature expansion would produce {features} monomials (limit 1000000)")]
    FeatureBlowup { features: u128 },

    #[error(
        "InsufficientBandSamples: filled {filled} of {quota} band samples after {draws} draws"
    )]
    InsufficientBandSamples {
        filled: usize,
        quota: usize,
        draws: usize,
    },

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("io error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
