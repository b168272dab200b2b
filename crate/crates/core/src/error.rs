use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
///
/// Every variant names the violated contract so that the CLI can echo it
/// back verbatim.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient series order: need {needed}, have {available}")]
    InsufficientOrder { needed: usize, available: usize },

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("sampling contract violated: dt = {dt} but dt * log(y) must be <= 0.5 (dt <= {max_dt})")]
    Sampling { dt: f64, max_dt: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
