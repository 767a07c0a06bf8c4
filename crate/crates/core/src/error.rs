use thiserror::Error;

/// Errors raised by the toolkit. Every variant corresponds to a violated
/// precondition of one of the public operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("time shift {value} is not a multiple of the grid spacing {spacing}")]
    OffGrid { value: f64, spacing: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension {dim} not supported: {reason}")]
    UnsupportedDimension { dim: usize, reason: &'static str },

    #[error("function has zero norm")]
    ZeroNorm,

    #[error("point {index} lies outside the {what}")]
    OutOfDomain { index: usize, what: &'static str },

    #[error("Gramian is ill-conditioned (condition number {condition:.3e} >= {limit:.1e})")]
    IllConditioned { condition: f64, limit: f64 },

    #[error("system is not biorthogonal (max defect {defect:.3e})")]
    NotBiorthogonal { defect: f64 },

    #[error("too few distance bins for a decay fit: {found} (need {needed})")]
    TooFewBins { found: usize, needed: usize },

    #[error("duplicate point at index {0}")]
    DuplicatePoint(usize),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
