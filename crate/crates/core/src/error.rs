use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree {degree} needs at least {needed} samples, got {got}")]
    Degree {
        degree: usize,
        needed: usize,
        got: usize,
    },

    #[error("quadrature resolution {got} is below the required {needed}")]
    Resolution { needed: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("positivity lost at Verblunsky index {index} (|alpha| = {modulus})")]
    PositivityLoss { index: usize, modulus: f64 },

    #[error("out of range: {0}")]
    Range(String),

    #[error("singular symbol: pivot modulus {modulus:e} at elimination step {step}")]
    Singular { step: usize, modulus: f64 },

    #[error("truncation too small: {0}")]
    Truncation(String),

    #[error("cumulant order {0} is not supported (maximum is 6)")]
    UnsupportedOrder(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("assertion failed: {0}")]
    Assertion(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
