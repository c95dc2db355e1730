use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("series too short: {0}")]
    TooShort(String),

    #[error("zero variance: {0}")]
    ZeroVariance(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("transform state mismatch: expected {expected}, found {found}")]
    StateKind { expected: &'static str, found: &'static str },

    #[error("optimization failed: {0}")]
    Optimization(String),

    #[error("training diverged: {0}")]
    Divergence(String),

    #[error("all candidates failed: {0}")]
    AllFailed(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("date parse error: {0}")]
    Date(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn too_short(msg: impl Into<String>) -> Self {
        Error::TooShort(msg.into())
    }
}
