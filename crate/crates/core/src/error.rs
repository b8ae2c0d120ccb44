use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain where the operation is defined.
    #[error("{name} = {value} is out of domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("mode index {index} out of range for a {n_modes}-mode state")]
    InvalidMode { index: usize, n_modes: usize },

    #[error("modes must be distinct (got {0} twice)")]
    RepeatedMode(usize),

    #[error("unsupported state: {0}")]
    UnsupportedState(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("budget must be at least {min}, got {got}")]
    Budget { min: usize, got: usize },

    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            reason,
        }
    }
}
