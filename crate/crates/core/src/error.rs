use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate overflow")]
    Overflow,

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid rule: {0}")]
    InvalidRule(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An enumeration would exceed the configured cap. `completed` is the last
    /// search radius that finished before the cap was hit, if any.
    #[error("cap exceeded for {what}: needs {needed} > cap {cap}{}", completed.map(|r| format!(" (completed radius {r})")).unwrap_or_default())]
    CapExceeded {
        what: String,
        needed: String,
        cap: u64,
        completed: Option<u32>,
    },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("schema error at `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn with_completed(self, radius: Option<u32>) -> Self {
        match self {
            Error::CapExceeded {
                what, needed, cap, ..
            } => Error::CapExceeded {
                what,
                needed,
                cap,
                completed: radius,
            },
            other => other,
        }
    }
}
