//! Error type shared by every module of the crate.

use alloc::string::String;

/// Errors raised by model construction, estimation and diagnostics.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A coordinate lies outside its declared interval.
    #[error("value {value} outside domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },
    /// A quadrature, solver or sampler produced a non-finite quantity.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Inputs have inconsistent dimensions.
    #[error("shape error: {0}")]
    Shape(String),
    /// A configuration value is invalid.
    #[error("configuration error: {0}")]
    Config(String),
    /// The requested computation is not supported for this input size.
    #[error("capability error: {0}")]
    Capability(String),
}

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn shape(msg: impl Into<String>) -> Error {
    Error::Shape(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn numeric(msg: impl Into<String>) -> Error {
    Error::Numeric(msg.into())
}
