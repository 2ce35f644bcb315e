use spectral_core::{
    frame_at, gauge_fix, inner, pinned_gauge, projector, CMatrix, CVector, EigenFrame, Gauge, HamiltonianFamily, ParameterPath,
    C64,
};

use crate::{integrate, EngineError, OdeOptions, StateTrajectory};

const GAP_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct MultiBandRun {
    pub times: Vec<f64>,
    /// `U(t)` on the band set, rows and columns in the order of `bands`.
    pub unitaries: Vec<CMatrix>,
    /// `U(t) c0`.
    pub amplitudes: Vec<CVector>,
    /// `Σ_b c0_b` transported, in the standard basis.
    pub states: StateTrajectory,
    /// `max_t ‖U†U − 1‖`.
    pub unitarity_defect: f64,
}

fn min_gap(values: &[f64], bands: &[usize]) -> f64 {
    let mut g = f64::INFINITY;
    for (c, &lc) in values.iter().enumerate() {
        if !bands.contains(&c) {
            for &s in bands {
                g = g.min((values[s] - lc).abs());
            }
        }
    }
    g
}

fn internal_gap(values: &[f64], bands: &[usize]) -> f64 {
    let mut g = f64::INFINITY;
    for (i, &a) in bands.iter().enumerate() {
        for &b in &bands[i + 1..] {
            g = g.min((values[a] - values[b]).abs());
        }
    }
    g
}

/// Spectral projector on the band ranks `bands` at time `t`.
fn band_projector<F: HamiltonianFamily + ?Sized>(family: &F, path: &ParameterPath, bands: &[usize], t: f64) -> CMatrix {
    let f = frame_at(family, &path.position(t)).expect("finite Hermitian family");
    projector(&f, bands)
}

/// `dP/dt` by a second-order stencil kept inside `[lo, hi]`.
fn projector_rate<F: HamiltonianFamily + ?Sized>(
    family: &F,
    path: &ParameterPath,
    bands: &[usize],
    t: f64,
    lo: f64,
    hi: f64,
) -> CMatrix {
    let d = ((hi - lo) * 1e-5).min(1e-4);
    let p = |s: f64| band_projector(family, path, bands, s);
    if t - d < lo {
        (p(t) * C64::new(-3.0, 0.0) + p(t + d) * C64::new(4.0, 0.0) - p(t + 2.0 * d)) / C64::new(2.0 * d, 0.0)
    } else if t + d > hi {
        (p(t) * C64::new(3.0, 0.0) - p(t - d) * C64::new(4.0, 0.0) + p(t - 2.0 * d)) / C64::new(2.0 * d, 0.0)
    } else {
        (p(t + d) - p(t - d)) / C64::new(2.0 * d, 0.0)
    }
}

fn flatten(m: &CMatrix) -> CVector {
    CVector::from_iterator(m.len(), m.iter().copied())
}

fn unflatten(v: &CVector, rows: usize) -> CMatrix {
    CMatrix::from_iterator(rows, v.len() / rows, v.iter().copied())
}

/// Multi-band adiabatic transport of the amplitudes `c0` over the bands `bands`
/// (ascending ranks at the start). The band subspace is carried by the
/// projector generator `H + i[Ṗ, P]`, which in the moving frame is
/// `i ċ = (E + K) c` with `K_ab = −i⟨a|ḃ⟩`; amplitudes are reported in frames
/// matched continuously from the start and phased by `gauge`.
pub fn adiabatic_propagate_multi<F: HamiltonianFamily + ?Sized>(
    family: &F,
    path: &ParameterPath,
    bands: &[usize],
    c0: &CVector,
    gauge: &Gauge,
) -> Result<MultiBandRun, EngineError> {
    let n = family.dim();
    if bands.is_empty() || bands.iter().any(|&b| b >= n) || c0.len() != bands.len() {
        return Err(EngineError::Invalid("band set and amplitudes are inconsistent".into()));
    }
    let mut sorted = bands.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != bands.len() {
        return Err(EngineError::Invalid("repeated band index".into()));
    }
    for (k, x) in path.points().iter().enumerate() {
        let f = frame_at(family, x)?;
        let scale = family.hamiltonian(x).norm();
        let g = min_gap(&f.values, bands);
        if g <= GAP_TOL * scale {
            return Err(EngineError::GapCollapse { t: path.times()[k], gap: g });
        }
    }

    let f0 = frame_at(family, &path.points()[0])?;
    let gauges: Vec<Gauge> = bands.iter().map(|&b| pinned_gauge(&f0, b, gauge)).collect();
    let phase = |f: &EigenFrame, slot: usize| -> Result<CVector, EngineError> {
        Ok(spectral_core::phase_fixed(&f.vector(bands[slot]), &gauges[slot], bands[slot])?)
    };
    let mut y0 = CMatrix::zeros(n, bands.len());
    for s in 0..bands.len() {
        y0.set_column(s, &phase(&f0, s)?);
    }

    // Integrate segment by segment so stencils never straddle a kink.
    let mut cuts = vec![path.t0()];
    cuts.extend(path.kinks());
    cuts.push(path.t1());
    let opts = OdeOptions::default();
    let mut results: Vec<CMatrix> = vec![y0.clone()];
    let mut y = flatten(&y0);
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let stops: Vec<f64> = path.times().iter().copied().filter(|&t| t > lo && t <= hi).collect();
        if stops.is_empty() {
            continue;
        }
        let rhs = |t: f64, v: &CVector| {
            let m = unflatten(v, n);
            let h = family.hamiltonian(&path.position(t));
            let p = band_projector(family, path, bands, t);
            let pd = projector_rate(family, path, bands, t, lo, hi);
            let comm = (&pd * &p - &p * &pd) * C64::new(0.0, 1.0);
            flatten(&((h + comm) * m * C64::new(0.0, -1.0)))
        };
        let (ys, _) = integrate(rhs, lo, &y, &stops, &opts)?;
        y = ys.last().expect("non-empty stops").clone();
        results.extend(ys.iter().map(|v| unflatten(v, n)));
    }

    // Band identity within the set follows overlap matching, skipping
    // references at internal degeneracies.
    let mut reference = f0.clone();
    let mut unitaries = Vec::with_capacity(results.len());
    let mut amplitudes = Vec::with_capacity(results.len());
    let mut states = Vec::with_capacity(results.len());
    let mut defect: f64 = 0.0;
    for (k, ym) in results.iter().enumerate() {
        let x = &path.points()[k];
        let raw = frame_at(family, x)?;
        let scale = family.hamiltonian(x).norm();
        let matched = if k == 0 { raw.clone() } else { gauge_fix(&raw, Some(&reference)).unwrap_or(raw.clone()) };
        let mut u = CMatrix::zeros(bands.len(), bands.len());
        for a in 0..bands.len() {
            let va = phase(&matched, a).unwrap_or_else(|_| matched.vector(bands[a]));
            for b in 0..bands.len() {
                u[(a, b)] = inner(&va, &ym.column(b).into_owned());
            }
        }
        defect = defect.max((u.adjoint() * &u - CMatrix::identity(bands.len(), bands.len())).norm());
        amplitudes.push(&u * c0);
        states.push(ym * c0);
        unitaries.push(u);
        if internal_gap(&raw.values, bands) > 1e-6 * scale.max(1e-300) {
            reference = matched;
        }
    }
    Ok(MultiBandRun {
        times: path.times().to_vec(),
        unitaries,
        amplitudes,
        states: StateTrajectory::new(path.times().to_vec(), states),
        unitarity_defect: defect,
    })
}

/// `E + K` in the frame of `frames_at(t)`, with `K_ab = −i⟨a|ḃ⟩` from a
/// central difference in time; `frames_at` must return a smooth gauge.
pub fn moving_frame_generator(frames_at: &dyn Fn(f64) -> EigenFrame, bands: &[usize], t: f64, dt: f64) -> CMatrix {
    let f = frames_at(t);
    let fp = frames_at(t + dt);
    let fm = frames_at(t - dt);
    let m = bands.len();
    let mut g = CMatrix::zeros(m, m);
    for (i, &a) in bands.iter().enumerate() {
        g[(i, i)] += C64::new(f.values[a], 0.0);
        let va = f.vector(a);
        for (j, &b) in bands.iter().enumerate() {
            let db = (fp.vector(b) - fm.vector(b)) / C64::new(2.0 * dt, 0.0);
            g[(i, j)] += C64::new(0.0, -1.0) * inner(&va, &db);
        }
    }
    g
}
