use adiabatic_engine::{EngineError, OdeError};
use spectral_core::SpectralError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KoopmanError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error("grid of {0} nodes is too coarse for spectral differentiation")]
    Grid(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{0}")]
    Invalid(String),
}
