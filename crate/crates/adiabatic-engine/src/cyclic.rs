use spectral_core::{inner, HamiltonianFamily, ParameterPath, C64};

use crate::single::wrap;
use crate::{EngineError, StateTrajectory};

/// Cyclicity tolerance on `1 − |⟨ψ(0), ψ(T)⟩|`.
pub const CYCLIC_TOL: f64 = 1e-6;

/// Total phase `arg⟨ψ(0), ψ(T)⟩` minus the dynamical phase `−∫⟨H⟩dt`, in `(−π, π]`.
/// The energy integral uses the trapezoid rule on the trajectory samples.
pub fn aharonov_anandan_phase<F: HamiltonianFamily + ?Sized>(
    trajectory: &StateTrajectory,
    family: &F,
    path: &ParameterPath,
) -> Result<f64, EngineError> {
    let first = &trajectory.states[0];
    let last = trajectory.last();
    let overlap = inner(first, last);
    if 1.0 - overlap.norm() > CYCLIC_TOL {
        return Err(EngineError::NotCyclic { overlap: overlap.norm() });
    }
    let energy: Vec<f64> = trajectory
        .times
        .iter()
        .zip(&trajectory.states)
        .map(|(&t, s)| {
            let h = family.hamiltonian(&path.position(t));
            (inner(s, &(h * s)) / C64::new(s.norm_squared(), 0.0)).re
        })
        .collect();
    let mut integral = 0.0;
    for k in 1..energy.len() {
        integral += 0.5 * (trajectory.times[k] - trajectory.times[k - 1]) * (energy[k] + energy[k - 1]);
    }
    Ok(wrap(overlap.arg() + integral))
}
