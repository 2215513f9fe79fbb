use thiserror::Error;

use crate::evolution::ContractionReport;

/// Errors raised by the numerical kernels and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("frequency step {step} is not a multiple of the DFT bin spacing {bin}")]
    IncompatibleStep { step: f64, bin: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error(
        "fixed-point iteration did not converge after {} iterations (last difference {:e})",
        .report.iterates,
        .report.diffs.last().copied().unwrap_or(f64::NAN)
    )]
    NonConvergence { report: Box<ContractionReport> },

    #[error("schema violation: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
