use spectral_core::SpectralError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuzzyError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("Fock truncation must be at least 2, got {0}")]
    Truncation(usize),
    #[error("coherent state |α| = {modulus:.3} exceeds the tail guard √(N/4) = {limit:.3}")]
    TailGuard { modulus: f64, limit: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("exponential fit residual {residual:.3e} too large")]
    FitResidual { residual: f64 },
    #[error("finite-difference stencil failed: {0}")]
    Stencil(String),
    #[error("{0}")]
    Invalid(String),
}
