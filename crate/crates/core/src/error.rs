use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violated an operation's precondition (dimension mismatch,
    /// out-of-range parameter, empty data, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A margin profile does not carry enough strictly positive, non-saturated
    /// points to fit an exponent.
    #[error("profile-degenerate: {usable} usable points in the fit window, need at least 3")]
    ProfileDegenerate { usable: usize },

    /// The excess risk collapsed to zero on too much of the fit window for a
    /// slope to be defined.
    #[error("exponential-regime: {nonzero} nonzero risks in the fit window, need at least 3")]
    ExponentialRegime { nonzero: usize },

    /// A numerical routine failed where the mathematics says it cannot.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
