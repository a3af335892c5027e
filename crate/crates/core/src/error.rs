use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("budget exceeded: {what} needs {needed}, cap is {cap}")]
    Budget { what: &'static str, needed: u64, cap: u64 },

    #[error("check failed: {0}")]
    CheckFailed(String),

    /// A structural equation that must be solvable turned out not to be.
    /// Reaching this indicates a defect, not a recoverable condition.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
