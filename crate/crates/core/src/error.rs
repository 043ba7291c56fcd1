use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cylinder mass {mass} outside [0,1] on word {word}")]
    MassOutOfRange { word: String, mass: f64 },
    #[error("cap mismatch: {0}")]
    CapMismatch(String),
    #[error("stream exhausted after {got} digits, {needed} required")]
    StreamExhausted { got: usize, needed: usize },
    #[error("support mismatch: {0}")]
    SupportMismatch(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("budget exhausted after {trials} trials (best deficit {best_deficit:.3e})")]
    BudgetExhausted {
        trials: usize,
        best_deficit: f64,
        best: Vec<u32>,
    },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<S: Into<String>>(msg: S) -> Error {
    Error::InvalidInput(msg.into())
}
