use thiserror::Error;

/// Errors raised by the geometry, localization and solver layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("numeric validity error: {0}")]
    Numeric(String),

    #[error("Klein coordinate too close to the unit sphere: |u| = {norm}")]
    Boundary { norm: f64 },

    #[error("degenerate frame: only {found} of {needed} spatial directions are independent")]
    DegenerateFrame { needed: usize, found: usize },

    #[error("ellipsoid lost positive definiteness at update {iteration} (a'Qa = {quad_form:e})")]
    Breakdown { iteration: usize, quad_form: f64 },

    #[error("oracle contract violation: {0}")]
    ContractViolation(String),

    #[error("instance construction failed: {0}")]
    Instance(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}
