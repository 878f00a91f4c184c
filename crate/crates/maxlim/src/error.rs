use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A model or run configuration is invalid.
    #[error("configuration error: {0}")]
    Config(String),

    /// The requested quantity is not available in closed form for this model.
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    /// Not enough data to form the estimate (e.g. zero exceedances).
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
