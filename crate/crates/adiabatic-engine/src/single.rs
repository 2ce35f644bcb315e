use std::f64::consts::PI;

use spectral_core::{
    adiabaticity_ratio, berry_connection_fd, frame_at, phase_fixed, pinned_gauge, Gauge, HamiltonianFamily, ParameterPath, C64,
};

use crate::{EngineError, StateTrajectory};

/// Ratio above which the single-band approximation is flagged.
pub const RATIO_WARN: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseDecomposition {
    /// `∫ λ_a dt`.
    pub dynamical: f64,
    /// `∫ A_i ẋ^i dt`.
    pub geometric: f64,
    pub band: usize,
}

impl PhaseDecomposition {
    /// Geometric phase reduced to `(−π, π]`.
    pub fn geometric_wrapped(&self) -> f64 {
        wrap(self.geometric)
    }
}

/// Reduces an angle to `(−π, π]`.
pub fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

#[derive(Clone, Debug)]
pub struct SingleBandRun {
    pub trajectory: StateTrajectory,
    pub phases: PhaseDecomposition,
    pub dynamical_series: Vec<f64>,
    pub geometric_series: Vec<f64>,
    pub ratio: f64,
    pub warning: Option<String>,
    /// Convention the reported eigenvectors and connection were computed in.
    pub gauge: Gauge,
}

/// Velocities at the two ends of the sample interval `[a, b]`, taken from inside it.
pub(crate) fn interval_velocities(path: &ParameterPath, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let eps = (b - a) * 1e-9;
    (path.velocity(a + eps), path.velocity(b - eps))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Strict adiabatic solution `e^{−i∫λ_a} e^{−i∫A·ẋ} |a, x(t)⟩` on the sample grid of `path`.
pub fn adiabatic_propagate_single<F: HamiltonianFamily + ?Sized>(
    family: &F,
    path: &ParameterPath,
    band: usize,
    gauge: &Gauge,
) -> Result<SingleBandRun, EngineError> {
    let report = adiabaticity_ratio(family, path, band)?;
    if report.crossing {
        return Err(EngineError::Crossing { band, t: report.worst_time });
    }
    let warning = (report.ratio > RATIO_WARN)
        .then(|| format!("adiabaticity ratio {:.3} exceeds {RATIO_WARN}", report.ratio));
    let f0 = frame_at(family, &path.points()[0])?;
    let g = pinned_gauge(&f0, band, gauge);
    let dirs: Vec<usize> = (0..family.n_params()).collect();
    let times = path.times();

    let mut values = Vec::with_capacity(times.len());
    let mut conns = Vec::with_capacity(times.len());
    let mut vectors = Vec::with_capacity(times.len());
    for x in path.points() {
        let f = frame_at(family, x)?;
        values.push(f.values[band]);
        conns.push(berry_connection_fd(family, x, band, &dirs, &g)?);
        vectors.push(phase_fixed(&f.vector(band), &g, band)?);
    }

    let mut dynamical = vec![0.0; times.len()];
    let mut geometric = vec![0.0; times.len()];
    for k in 1..times.len() {
        let dt = times[k] - times[k - 1];
        let (va, vb) = interval_velocities(path, times[k - 1], times[k]);
        dynamical[k] = dynamical[k - 1] + 0.5 * dt * (values[k - 1] + values[k]);
        geometric[k] = geometric[k - 1] + 0.5 * dt * (dot(&conns[k - 1], &va) + dot(&conns[k], &vb));
    }
    let states = vectors
        .into_iter()
        .enumerate()
        .map(|(k, v)| v * C64::from_polar(1.0, -(dynamical[k] + geometric[k])))
        .collect();
    let n = times.len() - 1;
    Ok(SingleBandRun {
        trajectory: StateTrajectory::new(times.to_vec(), states),
        phases: PhaseDecomposition { dynamical: dynamical[n], geometric: geometric[n], band },
        dynamical_series: dynamical,
        geometric_series: geometric,
        ratio: report.ratio,
        warning,
        gauge: g,
    })
}
