use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// The perimeter scale is under-resolved by the grid spacing.
    #[error("resolution too coarse: r = {r} needs spacing h <= {max_spacing} (got h = {spacing})")]
    Resolution { r: f64, spacing: f64, max_spacing: f64 },

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("inequality violated: {0}")]
    InequalityViolation(String),

    #[error("optimizer failure: {0}")]
    OptimizerFailure(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
