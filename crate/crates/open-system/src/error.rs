use adiabatic_engine::EngineError;
use spectral_core::SpectralError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpenError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not a density matrix: {0}")]
    NotDensity(String),
    #[error("label ({a}, {alpha}) overlaps its best bipartite eigenvector by only {overlap:.3}")]
    Labeling { a: usize, alpha: usize, overlap: f64 },
    #[error("labels ({a}, {alpha}) and ({b}, {beta}) select the same bipartite eigenvector")]
    AmbiguousLabel { a: usize, alpha: usize, b: usize, beta: usize },
    #[error("{0}")]
    Invalid(String),
}
