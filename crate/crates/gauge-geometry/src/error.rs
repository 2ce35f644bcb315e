use spectral_core::SpectralError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("loop is not closed: endpoints {gap:.3e} apart")]
    OpenLoop { gap: f64 },
    #[error("flux {flux:.6} (units of 2π) is {residual:.3} from an integer; refine the mesh")]
    RefinementNeeded { flux: f64, residual: f64 },
    #[error("phase jumps by {jump:.3} between samples {index} and {next}; overlap mesh too coarse", next = index + 1)]
    Unwrap { index: usize, jump: f64 },
    #[error("{0}")]
    Invalid(String),
}
