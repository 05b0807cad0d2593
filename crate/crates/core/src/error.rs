use thiserror::Error;

/// Errors raised by the counting, smoothing and verification routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse {input:?} as an exact rational: {reason}")]
    Parse { input: String, reason: &'static str },

    #[error("{what} must be positive")]
    NonPositive { what: &'static str },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("enumeration needs {needed} work units, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("lookup table too small: need index {needed}, limit {limit}")]
    TableRange { needed: u64, limit: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
