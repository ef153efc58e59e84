//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by the regression pipeline.
#[derive(Error, Debug)]
pub enum Error {
    /// Input data is malformed (non-finite values, empty matrix, shape mismatch).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// A caller-supplied argument is out of range or inconsistent.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A numerical routine failed or produced an unusable result.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// The response matrix is rank deficient, so (Y'Y)^(-1/2) does not exist.
    #[error("degenerate response: {0}")]
    DegenerateResponse(String),

    /// The leading canonical correlation is numerically zero; the predictors
    /// carry no detectable linear association with the response.
    #[error("no linear association between predictors and response")]
    NoAssociation,

    /// The operation requires a univariate response.
    #[error("unsupported response: {0}")]
    UnsupportedResponse(String),

    /// A projection direction has (numerically) zero variance.
    #[error("degenerate projection direction: variance below tolerance")]
    DegenerateDirection,

    /// The data itself is too degenerate for the requested operation.
    #[error("degenerate data: {0}")]
    DegenerateData(String),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::NumericalFailure(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
