use thiserror::Error;

/// Errors raised by sequence, weight and space operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sequence is not log-convex")]
    NotLogConvex,

    #[error("sequence is not normalized log-convex (LC)")]
    NotLC,

    #[error("no positive quotient on the stored horizon")]
    NoPositiveQuotient,

    #[error("horizon exceeded: {what} = {value} is outside the valid range (limit {limit})")]
    HorizonExceeded { what: &'static str, value: f64, limit: f64 },

    #[error("maximizer for index {index} not localized before the bracket cap s = {cap}")]
    MaximizerAtBracketCap { index: usize, cap: f64 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("incompatible systems: {0}")]
    IncompatibleSystems(String),

    #[error("prerequisite not met: {0}")]
    PrerequisiteNotMet(String),
}

impl Error {
    pub(crate) fn horizon(what: &'static str, value: f64, limit: f64) -> Self {
        Error::HorizonExceeded { what, value, limit }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
