use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("gapless input: spectral gap {gap:.3e} is below floor {floor:.3e}")]
    Gapless { gap: f64, floor: f64 },
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("impure state: |B^2 + 1| = {residual:.3e} exceeds {tolerance:.1e}")]
    ImpureState { residual: f64, tolerance: f64 },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("undefined fit: {0}")]
    UndefinedFit(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
