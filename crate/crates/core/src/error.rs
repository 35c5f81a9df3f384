use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MoyalError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("point is not on the grid")]
    NonGridPoint,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("size guard: {0}")]
    SizeGuard(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("window rejected: {0}")]
    Window(String),
    #[error("window is not idempotent (defect {defect:.3e})")]
    IdempotencyFailure { defect: f64 },
    #[error("vector potential does not generate the field: {0}")]
    Gauge(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for MoyalError {
    fn from(e: std::io::Error) -> Self {
        MoyalError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, MoyalError>;
