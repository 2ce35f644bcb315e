use spectral_core::{c64, inner, phase_fixed, CMatrix, CVector, Gauge, C64};

use crate::geometry::FuzzyGeometry;
use crate::quasi::{follow, quasi_coherent};
use crate::FuzzyError;

/// Default stencil step in the chart coordinates.
pub const STENCIL: f64 = 1e-4;

/// Chart of the plane `u ↦ (u¹, u², 0)`.
pub fn plane_chart(u: [f64; 2]) -> [f64; 3] {
    [u[0], u[1], 0.0]
}

/// Upper wormhole sheet in polar coordinates `(r, φ) ↦ (r cos φ, r sin φ, arccosh r)`.
pub fn wormhole_chart(u: [f64; 2]) -> [f64; 3] {
    let (s, c) = u[1].sin_cos();
    [u[0] * c, u[0] * s, u[0].acosh()]
}

/// Metric induced by the classical embedding `δ_ij ∂_a x^i ∂_b x^j`, by central differences.
pub fn embedding_metric(chart: impl Fn([f64; 2]) -> [f64; 3], u: [f64; 2], step: f64) -> [[f64; 2]; 2] {
    let t = tangents(&chart, u, step);
    let mut g = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            g[a][b] = (0..3).map(|i| t[a][i] * t[b][i]).sum();
        }
    }
    g
}

fn tangents(chart: &impl Fn([f64; 2]) -> [f64; 3], u: [f64; 2], step: f64) -> [[f64; 3]; 2] {
    let mut t = [[0.0; 3]; 2];
    for a in 0..2 {
        let (mut p, mut m) = (u, u);
        p[a] += step;
        m[a] -= step;
        let (xp, xm) = (chart(p), chart(m));
        for i in 0..3 {
            t[a][i] = (xp[i] - xm[i]) / (2.0 * step);
        }
    }
    t
}

#[derive(Clone, Debug)]
pub struct InducedMetric {
    pub point: [f64; 2],
    pub lambda: f64,
    pub dist: [[f64; 2]; 2],
    pub nc: [[f64; 2]; 2],
    pub total: [[f64; 2]; 2],
    /// Largest antisymmetric imaginary part discarded when realifying.
    pub imaginary: f64,
}

/// Chart derivatives of the quasi-coherent state, with neighbours phased
/// against the centre so this is the covariant derivative there.
fn derivatives(geometry: &FuzzyGeometry, chart: &impl Fn([f64; 2]) -> [f64; 3], u: [f64; 2], step: f64) -> Result<(f64, CVector, [CVector; 2]), FuzzyError> {
    let q = quasi_coherent(geometry, &chart(u))?;
    let mut out = Vec::with_capacity(2);
    for a in 0..2 {
        let (mut p, mut m) = (u, u);
        p[a] += step;
        m[a] -= step;
        let vp = follow(geometry, &chart(p), &q.state)?;
        let vm = follow(geometry, &chart(m), &q.state)?;
        out.push((vp - vm) / c64(2.0 * step, 0.0));
    }
    let d1 = out.pop().unwrap_or_default();
    let d0 = out.pop().unwrap_or_default();
    Ok((q.lambda, q.state, [d0, d1]))
}

fn form(op: &CMatrix, d: &[CVector; 2]) -> ([[f64; 2]; 2], f64) {
    let mut g = [[0.0; 2]; 2];
    let mut imag: f64 = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let v: C64 = inner(&d[a], &(op * &d[b]));
            let w: C64 = inner(&d[b], &(op * &d[a]));
            g[a][b] = 0.5 * (v.re + w.re);
            imag = imag.max(v.im.abs());
        }
    }
    (g, imag)
}

/// `γ = γ^dist + γ^nc` at the chart point `u`.
pub fn induced_metric(geometry: &FuzzyGeometry, chart: impl Fn([f64; 2]) -> [f64; 3], u: [f64; 2], step: f64) -> Result<InducedMetric, FuzzyError> {
    let (lambda, _, d) = derivatives(geometry, &chart, u, step)?;
    let x = chart(u);
    let (dist, i1) = form(&geometry.distance_squared(&x), &d);
    let (nc, i2) = form(&geometry.noncommutative_term(), &d);
    let mut total = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            total[a][b] = dist[a][b] + nc[a][b];
        }
    }
    Ok(InducedMetric { point: u, lambda, dist, nc, total, imaginary: i1.max(i2) })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftVector {
    /// `A_a = −i⟨0|∂_a 0⟩` in chart components.
    pub coordinate: [f64; 2],
    /// Components along the unit tangents `e_a`.
    pub unit: [f64; 2],
}

/// Berry connection of the quasi-coherent states along the chart, with every
/// state phased so that component `component` of its vector is real positive.
pub fn shift_vector(
    geometry: &FuzzyGeometry,
    chart: impl Fn([f64; 2]) -> [f64; 3],
    u: [f64; 2],
    step: f64,
    component: usize,
) -> Result<ShiftVector, FuzzyError> {
    let q = quasi_coherent(geometry, &chart(u))?;
    let gauge = Gauge::Component(component);
    let v0 = phase_fixed(&q.state, &gauge, 0)?;
    let t = tangents(&chart, u, step);
    let mut coordinate = [0.0; 2];
    let mut unit = [0.0; 2];
    for a in 0..2 {
        let (mut p, mut m) = (u, u);
        p[a] += step;
        m[a] -= step;
        let vp = phase_fixed(&follow(geometry, &chart(p), &q.state)?, &gauge, 0)?;
        let vm = phase_fixed(&follow(geometry, &chart(m), &q.state)?, &gauge, 0)?;
        let dv = (vp - vm) / c64(2.0 * step, 0.0);
        coordinate[a] = (c64(0.0, -1.0) * inner(&v0, &dv)).re;
        let len = t[a].iter().map(|c| c * c).sum::<f64>().sqrt();
        unit[a] = coordinate[a] / len;
    }
    Ok(ShiftVector { coordinate, unit })
}

/// Gauge-free `arg Π⟨0,u_k|0,u_{k+1}⟩ ≈ ∮A·du` around a closed chart polygon.
pub fn loop_phase(geometry: &FuzzyGeometry, chart: impl Fn([f64; 2]) -> [f64; 3], polygon: &[[f64; 2]]) -> Result<f64, FuzzyError> {
    if polygon.len() < 3 {
        return Err(FuzzyError::Invalid("a loop needs at least three vertices".into()));
    }
    let states: Vec<CVector> = polygon.iter().map(|&u| quasi_coherent(geometry, &chart(u)).map(|q| q.state)).collect::<Result<_, _>>()?;
    let mut prod = c64(1.0, 0.0);
    for k in 0..states.len() {
        let o = inner(&states[k], &states[(k + 1) % states.len()]);
        prod *= o / o.norm();
    }
    Ok(prod.arg())
}

/// Coefficients of `ds² = dt² − (Aᵃdt + duᵃ)(Aᵇdt + duᵇ)γ_ab` with `c = 1`,
/// written as `g_tt dt² + 2 g_ta dt duᵃ + g_ab duᵃ duᵇ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineElement {
    pub g_tt: f64,
    pub g_t: [f64; 2],
    pub g: [[f64; 2]; 2],
}

pub fn emergent_line_element(gamma: &[[f64; 2]; 2], shift: &[f64; 2]) -> LineElement {
    let mut g_tt = 1.0;
    let mut g_t = [0.0; 2];
    let mut g = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            g_tt -= gamma[a][b] * shift[a] * shift[b];
            g_t[b] -= gamma[a][b] * shift[a];
            g[a][b] = -gamma[a][b];
        }
    }
    LineElement { g_tt, g_t, g }
}
