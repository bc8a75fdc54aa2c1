use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("singular linear system: {0}")]
    Singular(String),
    #[error("constraint blow-up at t = {time}: {residual} = {value:.3e}")]
    BlowUp {
        time: f64,
        residual: String,
        value: f64,
    },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
