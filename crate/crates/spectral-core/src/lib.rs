//! Spectral substrate shared by the other crates of the workspace.
//!
//! Everything here is a pure function of its inputs: Hermitian operators,
//! eigenframes with reproducible phase conventions, parameter paths and
//! the non-adiabatic couplings between instantaneous eigenvectors.

pub mod connection;
pub mod coupling;
pub mod error;
pub mod family;
pub mod frame;
pub mod operator;
pub mod path;

pub use connection::{berry_connection_fd, check_isolated, matched_vector, pinned_gauge, projector, track_frames};
pub use coupling::{
    adiabaticity_ratio, coupling_matrix, nonadiabatic_coupling, Coupling, RatioReport,
};
pub use error::SpectralError;
pub use family::{ConicalModel, FnFamily, HamiltonianFamily, SpinField, TwinCone};
pub use frame::{eigendecompose, frame_at, gauge_fix, phase_fixed, EigenFrame, Gauge};
pub use operator::{pauli, HermitianOperator, ParameterPoint};
pub use path::{Circle, Curve, FnCurve, ParameterPath, Polyline};

pub use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Complex unit `i`.
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `⟨u, v⟩`, antilinear in the first argument.
pub fn inner(u: &CVector, v: &CVector) -> C64 {
    u.dotc(v)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}
