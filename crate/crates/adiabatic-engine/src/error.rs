use spectral_core::SpectralError;
use thiserror::Error;

use crate::OdeError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("integration failed: {0}")]
    Ode(#[from] OdeError),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("band {band} crosses another band near t = {t:.6}; use multi-band transport")]
    Crossing { band: usize, t: f64 },
    #[error("gap between the band set and its complement collapses near t = {t:.6} (gap {gap:.3e})")]
    GapCollapse { t: f64, gap: f64 },
    #[error("trajectory is not cyclic: |⟨ψ(0), ψ(T)⟩| = {overlap:.9}")]
    NotCyclic { overlap: f64 },
    #[error("tangent vector vanishes on the {side} side of t* = {t:.6}")]
    VanishingTangent { side: &'static str, t: f64 },
}
