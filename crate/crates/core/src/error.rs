use thiserror::Error;

/// Errors raised by the geometry, discretization and spectral layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({re}, {im}) is not inside the open unit disk")]
    OutsideDisk { re: f64, im: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kernel is singular at coincident points; use the diagonal rule")]
    SingularKernel,

    #[error("too few nodes: found {found}, need at least {required}")]
    TooFewNodes { found: usize, required: usize },

    #[error("objects live on different quadrature grids")]
    GridMismatch,

    #[error("operation requires a grid paired with a polarizer")]
    UnpairedGrid,

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("eigensolver failed to converge: {0}")]
    NoConvergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
