use thiserror::Error;

#[derive(Debug, Error)]
pub enum WlabError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate immersion at chart point ({u:.6}, {v:.6}): {what}")]
    Degenerate { u: f64, v: f64, what: String },
    #[error("no convergence: {0}")]
    NotConverged(String),
    #[error("F is not Morse: {0}")]
    NotMorse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("measurement routes disagree: {0}")]
    RouteMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, WlabError>;
