use thiserror::Error;

/// Errors raised by the counting model, the QM reference and the oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("factorial argument {k} exceeds the table limit {limit}")]
    RangeViolation { k: usize, limit: usize },

    #[error("factorial ratio {numerator}/{denominator} is not integral")]
    NonIntegralRatio {
        numerator: String,
        denominator: String,
    },

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("normalization denominator is zero")]
    DegenerateNormalization,

    #[error("no b_map grid point at n = {n} lies within {tolerance} of tau = {tau}")]
    NoGridPoint { n: u32, tau: f64, tolerance: f64 },

    #[error("sequence lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("exhaustive enumeration is limited to n <= {limit}, got n = {n}")]
    EnumerationLimit { n: u32, limit: u32 },

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
