use std::sync::Arc;

use adiabatic_engine::single::wrap;
use adiabatic_engine::{schrodinger_propagate, StateTrajectory};
use spectral_core::{c64, frame_at, inner, Circle, ConicalModel, CVector, ParameterPath};

use crate::{sk_propagate, KoopmanError, LiouvilleOperator, NodeHamiltonians, PeriodicGrid, SKState, SkTrajectory};

/// `max_t ‖⟨θ(t)|Ψ(t)⟩/‖·‖ − ψ(t)‖` over the common sample times.
pub fn correspondence_check(
    sk: &SkTrajectory,
    op: &LiouvilleOperator,
    theta: impl Fn(f64) -> f64,
    reference: &StateTrajectory,
) -> Result<f64, KoopmanError> {
    if sk.times.len() != reference.times.len() {
        return Err(KoopmanError::Dimension(format!("{} joint samples, {} reference samples", sk.times.len(), reference.times.len())));
    }
    let mut worst = 0.0f64;
    for ((t, s), (tr, psi)) in sk.times.iter().zip(&sk.states).zip(reference.times.iter().zip(&reference.states)) {
        if (t - tr).abs() > 1e-12 * (1.0 + t.abs()) {
            return Err(KoopmanError::Invalid(format!("sample times differ: {t} vs {tr}")));
        }
        let v = s.evaluate(op, theta(*t));
        let n = v.norm();
        if n < 1e-300 {
            return Err(KoopmanError::Invalid(format!("evaluation vanishes at t = {t}")));
        }
        worst = worst.max((v / c64(n, 0.0) - psi).norm());
    }
    Ok(worst)
}

/// Two-level model `H = cos θ σx + sin θ σy` driven round the unit circle at angular speed `omega`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircleCorrespondence {
    pub omega: f64,
    pub duration: f64,
    pub theta0: f64,
    /// Concentration of the von Mises profile.
    pub kappa: f64,
    pub band: usize,
    pub samples: usize,
    pub tol: f64,
}

impl Default for CircleCorrespondence {
    fn default() -> Self {
        Self { omega: 0.05, duration: 20.0, theta0: 0.3, kappa: 1000.0, band: 0, samples: 201, tol: 1e-11 }
    }
}

#[derive(Clone, Debug)]
pub struct CorrespondenceRun {
    pub m: usize,
    pub deviation: f64,
    pub norm_drift: f64,
    pub operator: LiouvilleOperator,
    pub sk: SkTrajectory,
    pub reference: StateTrajectory,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub m: usize,
    pub deviation: f64,
    pub norm_drift: f64,
}

impl ConvergenceRow {
    pub const HEADER: [&'static str; 3] = ["m", "max_deviation", "norm_drift"];
}

impl CircleCorrespondence {
    pub fn validate(&self) -> Result<(), KoopmanError> {
        let finite = [self.omega, self.duration, self.theta0, self.kappa, self.tol].iter().all(|v| v.is_finite());
        if !finite || self.duration <= 0.0 || self.kappa <= 0.0 || self.samples < 2 || self.band > 1 {
            return Err(KoopmanError::Invalid(format!("bad correspondence configuration {self:?}")));
        }
        Ok(())
    }

    pub fn chart(theta: f64) -> Vec<f64> {
        vec![theta.cos(), theta.sin()]
    }

    pub fn theta(&self, t: f64) -> f64 {
        self.theta0 + self.omega * t
    }

    pub fn times(&self) -> Vec<f64> {
        let n = self.samples - 1;
        (0..=n).map(|k| self.duration * k as f64 / n as f64).collect()
    }

    pub fn initial_state(&self) -> Result<CVector, KoopmanError> {
        Ok(frame_at(&ConicalModel, &Self::chart(self.theta0))?.vector(self.band))
    }

    pub fn reference(&self) -> Result<StateTrajectory, KoopmanError> {
        let curve = Circle { center: [0.0, 0.0], radius: 1.0, omega: self.omega, phase: self.theta0 };
        let path = ParameterPath::from_curve(Arc::new(curve), 0.0, self.duration, self.samples)?;
        Ok(schrodinger_propagate(&ConicalModel, &path, &self.initial_state()?, self.tol)?)
    }

    /// Joint propagation without the reference comparison.
    pub fn propagate(&self, m: usize) -> Result<(LiouvilleOperator, SkTrajectory), KoopmanError> {
        self.validate()?;
        let op = LiouvilleOperator::rotation(PeriodicGrid::new(m)?, self.omega);
        let h = NodeHamiltonians::sample(&ConicalModel, &op, Self::chart);
        let psi0 = SKState::von_mises(&self.initial_state()?, op.grid, self.theta0, self.kappa)?;
        let sk = sk_propagate(&h, &op, &psi0, &self.times(), self.tol)?;
        Ok((op, sk))
    }

    pub fn run(&self, m: usize) -> Result<CorrespondenceRun, KoopmanError> {
        let (op, sk) = self.propagate(m)?;
        let reference = self.reference()?;
        let deviation = correspondence_check(&sk, &op, |t| self.theta(t), &reference)?;
        Ok(CorrespondenceRun { m, deviation, norm_drift: sk.norm_drift, operator: op, sk, reference })
    }

    pub fn convergence(&self, sizes: &[usize]) -> Result<Vec<ConvergenceRow>, KoopmanError> {
        sizes
            .iter()
            .map(|&m| self.run(m).map(|r| ConvergenceRow { m, deviation: r.deviation, norm_drift: r.norm_drift }))
            .collect()
    }
}

/// Geometric phase read off the joint state after one loop: `arg⟨ψ0, ψ(T)⟩ + ∫λ dt` with `λ` constant.
pub fn loop_phase_from_sk(run: &CorrespondenceRun, cfg: &CircleCorrespondence, energy: f64) -> Result<f64, KoopmanError> {
    let psi0 = cfg.initial_state()?;
    let v = run.sk.last().evaluate(&run.operator, cfg.theta(cfg.duration));
    let v = &v / c64(v.norm(), 0.0);
    Ok(wrap(inner(&psi0, &v).arg() + energy * cfg.duration))
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::{pauli, FnFamily};

    #[test]
    fn uniform_hamiltonian_gives_exact_transport() {
        let g = PeriodicGrid::new(64).unwrap();
        let omega = 0.3;
        let op = LiouvilleOperator::rotation(g, omega);
        let fam = FnFamily::new(2, 2, |_x: &[f64]| pauli(2) * c64(0.7, 0.0) + pauli(0) * c64(0.2, 0.0));
        let h = NodeHamiltonians::sample(&fam, &op, CircleCorrespondence::chart);
        let psi0 = CVector::from_vec(vec![c64(0.6, 0.0), c64(0.0, 0.8)]);
        let s0 = SKState::von_mises(&psi0, g, 1.0, 4.0).unwrap();
        let times: Vec<f64> = (0..=20).map(|k| 0.4 * k as f64).collect();
        let sk = sk_propagate(&h, &op, &s0, &times, 1e-12).unwrap();
        let path = ParameterPath::sampled(times.clone(), vec![vec![0.0, 0.0]; times.len()]).unwrap();
        let reference = schrodinger_propagate(&fam, &path, &psi0, 1e-12).unwrap();
        let dev = correspondence_check(&sk, &op, |t| 1.0 + omega * t, &reference).unwrap();
        assert!(dev < 1e-9, "{dev}");
    }

    #[test]
    fn frozen_flow_matches_the_node_at_rest() {
        let cfg = CircleCorrespondence { omega: 0.0, theta0: CircleCorrespondence::default().theta0, duration: 5.0, samples: 11, ..Default::default() };
        let g = PeriodicGrid::new(16).unwrap();
        let cfg = CircleCorrespondence { theta0: g.node(3), ..cfg };
        let run = cfg.run(16).unwrap();
        assert!(run.deviation < 1e-8, "{}", run.deviation);
    }

    #[test]
    fn mismatched_samples_are_rejected() {
        let cfg = CircleCorrespondence { duration: 1.0, samples: 5, ..Default::default() };
        let (op, sk) = cfg.propagate(32).unwrap();
        let short = CircleCorrespondence { samples: 4, ..cfg }.reference().unwrap();
        assert!(matches!(correspondence_check(&sk, &op, |t| cfg.theta(t), &short), Err(KoopmanError::Dimension(_))));
    }

    #[test]
    fn bad_configuration_is_rejected() {
        assert!(CircleCorrespondence { kappa: -1.0, ..Default::default() }.run(32).is_err());
        assert!(CircleCorrespondence { band: 2, ..Default::default() }.validate().is_err());
    }
}
