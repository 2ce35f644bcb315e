use adiabatic_engine::schrodinger_propagate;
use std::f64::consts::PI;
use std::sync::Arc;

use spectral_core::{c64, CMatrix, FnCurve, ParameterPath};

use crate::connection::{connection_from, section, Flavor};
use crate::density::{entropy_of, partial_trace_matrix, DensityMatrix, Keep};
use crate::mixed::{labeled_spectrum, reduced, RESONANCE_FACTOR};
use crate::{BipartiteFamily, OpenError, Total};

#[derive(Clone, Debug)]
pub struct WeakTransport {
    pub times: Vec<f64>,
    /// `U_E U_A ρ^ε(x(t)) U_A† U_E†` per sample.
    pub states: Vec<CMatrix>,
    /// `ρ^ε(x(t))` per sample.
    pub eigen_mixed: Vec<CMatrix>,
    pub flavor: Flavor,
    /// `max |tr ρ(t) − 1|`.
    pub trace_drift: f64,
    /// Smallest eigenvalue of the Hermitian part of any `ρ(t)`.
    pub min_eigenvalue: f64,
    /// `max |S(ρ(t)) − S(ρ^ε(x(t)))|`, spectra normalised by the trace.
    pub entropy_shift: f64,
    /// Samples where the gap condition failed.
    pub warnings: Vec<(usize, String)>,
}

fn spectrum(m: &CMatrix) -> Result<Vec<f64>, OpenError> {
    let h = (m + m.adjoint()) * c64(0.5, 0.0);
    Ok(spectral_core::eigendecompose(&spectral_core::HermitianOperator::new(h)?)?.values)
}

fn normalized_entropy(m: &CMatrix) -> Result<f64, OpenError> {
    let e = spectrum(m)?;
    let t: f64 = e.iter().sum();
    Ok(entropy_of(&e.iter().map(|v| (v / t).max(0.0)).collect::<Vec<_>>()))
}

/// Weak adiabatic transport of the eigen mixed state `(a, α)` along `path`.
///
/// The propagators act in the fixed system basis: at each step
/// `U_A ← U_A exp(−i X(x_m)·ẋ_m dt)` with `X` the chosen connection and
/// `U_E ← exp(−i E(x_m) dt) U_E` with `E = Σ_b λ_{bα}|b⟩⟨b|`, both at the
/// midpoint. Connections use the section of the first sample.
pub fn weak_adiabatic_propagate<B: BipartiteFamily + ?Sized>(
    family: &B,
    path: &ParameterPath,
    a: usize,
    alpha: usize,
    flavor: Flavor,
) -> Result<WeakTransport, OpenError> {
    let (ds, _) = family.dims();
    if path.n_params() != family.n_params() {
        return Err(OpenError::Dimension(format!("path has {} parameters, family {}", path.n_params(), family.n_params())));
    }
    let times = path.times().to_vec();
    let w = labeled_spectrum(family, &path.position(times[0]))?.vector(a, alpha);
    let eps = family.epsilon();
    let mut ua = CMatrix::identity(ds, ds);
    let mut ue = CMatrix::identity(ds, ds);
    let mut states = Vec::with_capacity(times.len());
    let mut eigen_mixed = Vec::with_capacity(times.len());
    let mut warnings = Vec::new();
    let (mut trace_drift, mut min_eig, mut entropy_shift) = (0.0f64, f64::INFINITY, 0.0f64);
    for (k, &t) in times.iter().enumerate() {
        if k > 0 {
            let dt = t - times[k - 1];
            let tm = t - 0.5 * dt;
            let lab = labeled_spectrum(family, &path.position(tm))?;
            let conn = connection_from(family, &lab, a, alpha, flavor, Some(&w))?;
            let g = conn.contracted(&path.velocity(tm));
            ua = &ua * (g * c64(0.0, -dt)).exp();
            let e = (0..ds).fold(CMatrix::zeros(ds, ds), |acc, b| {
                let v = lab.system.vector(b);
                acc + (&v * v.adjoint()) * c64(lab.energy(b, alpha), 0.0)
            });
            ue = (e * c64(0.0, -dt)).exp() * &ue;
        }
        let lab = labeled_spectrum(family, &path.position(t))?;
        let gap = lab.resonance_gap(alpha);
        if gap <= RESONANCE_FACTOR * eps {
            warnings.push((k, format!("gap {gap:.3e} at t = {t}")));
        }
        let rho = reduced(&section(&lab.vector(a, alpha), &w)?, family.dims())?;
        let u = &ue * &ua;
        let state = &u * &rho * u.adjoint();
        let tr = state.trace();
        trace_drift = trace_drift.max((tr - c64(1.0, 0.0)).norm());
        min_eig = min_eig.min(spectrum(&state)?.into_iter().fold(f64::INFINITY, f64::min));
        entropy_shift = entropy_shift.max((normalized_entropy(&state)? - normalized_entropy(&rho)?).abs());
        states.push(state);
        eigen_mixed.push(rho);
    }
    Ok(WeakTransport { times, states, eigen_mixed, flavor, trace_drift, min_eigenvalue: min_eig, entropy_shift, warnings })
}

/// Reduced states of the exact bipartite evolution from `|a,α,x(t0)⟩`.
pub fn bipartite_oracle<B: BipartiteFamily + ?Sized>(
    family: &B,
    path: &ParameterPath,
    a: usize,
    alpha: usize,
    tol: f64,
) -> Result<Vec<DensityMatrix>, OpenError> {
    let psi0 = labeled_spectrum(family, &path.position(path.t0()))?.vector(a, alpha);
    let tr = schrodinger_propagate(&Total(family), path, &psi0, tol)?;
    tr.states
        .iter()
        .map(|s| {
            let m = partial_trace_matrix(&(s * s.adjoint()), family.dims(), Keep::System)?;
            let m = (&m + m.adjoint()) * c64(0.5, 0.0);
            let t = m.trace();
            DensityMatrix::new(m / t)
        })
        .collect()
}

/// Quarter turn of the unit circle from (1, 0) to (0, 1) with zero speed at both ends.
pub fn quarter_arc(period: f64, n: usize) -> Result<ParameterPath, OpenError> {
    let th = move |t: f64| 0.5 * PI * (t / period - (2.0 * PI * t / period).sin() / (2.0 * PI));
    let thd = move |t: f64| 0.5 * PI * (1.0 - (2.0 * PI * t / period).cos()) / period;
    let c = FnCurve::new(2, move |t: f64| vec![th(t).cos(), th(t).sin()], move |t: f64| {
        let (s, c) = th(t).sin_cos();
        vec![-thd(t) * s, thd(t) * c]
    });
    Ok(ParameterPath::from_curve(Arc::new(c), 0.0, period, n)?)
}
