use thiserror::Error;

/// Errors produced anywhere in the estimation stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid data at row {row}: {msg}")]
    InvalidData { row: usize, msg: String },

    #[error("empty dataset")]
    EmptyData,

    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("singular prior: {0}")]
    SingularPrior(String),

    #[error("approximation unavailable: {0}")]
    ApproximationUnavailable(String),

    #[error("insufficient sample: need at least {needed} draws, got {got}")]
    InsufficientSample { needed: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status for command-line use: 1 numeric failure, 2 usage or
    /// bad input, 3 degenerate model condition.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams(_)
            | Error::InvalidData { .. }
            | Error::EmptyData
            | Error::Domain(_)
            | Error::Config(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::SingularPrior(_) | Error::ApproximationUnavailable(_) | Error::InsufficientData { .. } => 3,
            Error::Numeric(_) | Error::UnsupportedRegime(_) | Error::InsufficientSample { .. } => 1,
        }
    }
}
