use thiserror::Error;

/// Errors raised across the release pipeline, the synthetic mechanism and the
/// experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite input values at indices {indices:?}")]
    NonFinite { indices: Vec<usize> },

    #[error("entropy is undefined for an empty histogram")]
    EmptyHistogram,

    #[error("bin specifications differ: {0}")]
    SpecMismatch(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("enumeration too large ({size} > {limit}); use the Monte-Carlo audit instead")]
    EnumerationTooLarge { size: usize, limit: usize },

    #[error("invalid mechanism parameters: {}", .0.join("; "))]
    InvalidFParams(Vec<String>),

    #[error("configuration error: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("data error: {0}")]
    Data(String),

    #[error("internal assertion failed: {0}")]
    Assertion(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Process exit code for the command-line harness: 1 for configuration
    /// problems, 2 for data problems, 3 for failed internal assertions.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::InvalidFParams(_)
            | Error::Config(_)
            | Error::Json(_) => 1,
            Error::NonFinite { .. }
            | Error::EmptyHistogram
            | Error::SpecMismatch(_)
            | Error::GridMismatch(_)
            | Error::Data(_)
            | Error::Io(_)
            | Error::Csv(_) => 2,
            Error::EnumerationTooLarge { .. } | Error::Assertion(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
