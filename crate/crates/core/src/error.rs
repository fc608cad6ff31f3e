use thiserror::Error;

/// Where in the discretization a failure was detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub cell: usize,
    pub node: usize,
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "cell {} node {}", self.cell, self.node)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// A macroscopic state with non-positive density or temperature.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A time step produced an invalid state somewhere in the domain.
    #[error("time step failed at {location}: {reason}")]
    StepFailure { location: Location, reason: String },

    /// Parameters that can never be valid (bad thresholds, bad mesh, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Time step above the explicit stability limit.
    #[error("time step {dt:e} exceeds the stability limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value for `{key}`: {message}")]
    Validation { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidState(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for configuration-type failures (as opposed to solver failures).
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Cfl { .. } | Error::Parse { .. } | Error::Validation { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
