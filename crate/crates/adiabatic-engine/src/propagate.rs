use spectral_core::{frame_at, inner, track_frames, CVector, Gauge, HamiltonianFamily, ParameterPath, C64};

use crate::{integrate, EngineError, OdeOptions};

#[derive(Clone, Debug)]
pub struct StateTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<CVector>,
    /// `max_t |‖ψ(t)‖ − 1|`, reported rather than corrected.
    pub norm_drift: f64,
}

impl StateTrajectory {
    pub fn new(times: Vec<f64>, states: Vec<CVector>) -> Self {
        let norm_drift = states.iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max);
        Self { times, states, norm_drift }
    }

    pub fn last(&self) -> &CVector {
        self.states.last().expect("non-empty trajectory")
    }
}

pub(crate) fn check_unit(psi: &CVector) -> Result<(), EngineError> {
    let n = psi.norm();
    if (n - 1.0).abs() > 1e-10 {
        return Err(EngineError::Invalid(format!("initial state norm {n} is not 1")));
    }
    Ok(())
}

/// `i ψ̇ = H(x(t)) ψ` integrated adaptively through every sample time of `path`.
pub fn schrodinger_propagate<F: HamiltonianFamily + ?Sized>(
    family: &F,
    path: &ParameterPath,
    psi0: &CVector,
    tol: f64,
) -> Result<StateTrajectory, EngineError> {
    if !(tol > 1e-13 && tol < 1e-4) {
        return Err(EngineError::Invalid(format!("tolerance {tol} outside (1e-13, 1e-4)")));
    }
    if psi0.len() != family.dim() {
        return Err(EngineError::Invalid(format!("state has dimension {}, family {}", psi0.len(), family.dim())));
    }
    check_unit(psi0)?;
    let opts = OdeOptions::with_rtol(tol);
    let rhs = |t: f64, y: &CVector| (family.hamiltonian(&path.position(t)) * y) * C64::new(0.0, -1.0);
    let (states, _) = integrate(rhs, path.t0(), psi0, path.times(), &opts)?;
    Ok(StateTrajectory::new(path.times().to_vec(), states))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// Standard basis of the Hilbert space.
    Bare,
    /// Instantaneous eigenbasis in ascending energy order at each time.
    Instantaneous,
    /// Instantaneous eigenbasis with bands followed by overlap matching from the start.
    Matched,
}

/// `|⟨e_k, ψ(t)⟩|²` for each sample of `trajectory` in the chosen basis.
pub fn occupation_probabilities<F: HamiltonianFamily + ?Sized>(
    trajectory: &StateTrajectory,
    family: &F,
    path: &ParameterPath,
    basis: Basis,
) -> Result<Vec<Vec<f64>>, EngineError> {
    match basis {
        Basis::Bare => Ok(trajectory.states.iter().map(|s| s.iter().map(|z| z.norm_sqr()).collect()).collect()),
        Basis::Instantaneous => trajectory
            .times
            .iter()
            .zip(&trajectory.states)
            .map(|(&t, s)| {
                let f = frame_at(family, &path.position(t))?;
                Ok((0..f.dim()).map(|a| inner(&f.vector(a), s).norm_sqr()).collect())
            })
            .collect(),
        Basis::Matched => {
            let pts: Vec<Vec<f64>> = trajectory.times.iter().map(|&t| path.position(t)).collect();
            let frames = track_frames(family, &pts, Some(&Gauge::Matched))?;
            Ok(frames
                .iter()
                .zip(&trajectory.states)
                .map(|(f, s)| (0..f.dim()).map(|a| inner(&f.vector(a), s).norm_sqr()).collect())
                .collect())
        }
    }
}
