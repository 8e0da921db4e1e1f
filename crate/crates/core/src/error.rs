use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("chart mismatch: {left} vs {right} variables")]
    ChartMismatch { left: usize, right: usize },

    #[error("index {index} out of range for {len} variables")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("form degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
