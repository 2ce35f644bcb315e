use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("operator is not Hermitian: max asymmetry {asymmetry:.3e} (scale {scale:.3e})")]
    NotHermitian { asymmetry: f64, scale: f64 },
    #[error("operator has non-finite entries")]
    NonFinite,
    #[error("operator must be square and non-empty, got {rows}x{cols}")]
    Shape { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ambiguous band matching: best overlap {overlap:.3} for band {band}")]
    AmbiguousMatching { band: usize, overlap: f64 },
    #[error("near-degeneracy between bands {a} and {b}: gap {gap:.3e}")]
    NearDegenerate { a: usize, b: usize, gap: f64 },
    #[error("band index {band} out of range for dimension {dim}")]
    BandOutOfRange { band: usize, dim: usize },
    #[error("diagonal element requested: bands coincide ({band}); use the Berry connection")]
    SameBand { band: usize },
    #[error("gauge undefined: reference overlap {overlap:.3e} vanishes for band {band}")]
    GaugeUndefined { band: usize, overlap: f64 },
    #[error("invalid path: {0}")]
    InvalidPath(String),
}
