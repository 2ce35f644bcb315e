use spectral_core::{frame_at, inner, phase_fixed, CMatrix, CVector, Gauge, HamiltonianFamily, ParameterPath, C64};

use crate::EngineError;

/// Amplitudes entering a conical crossing with the bend parameters.
/// Band 1 is the upper band of the crossing pair, band 2 the lower.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransitCoefficients {
    pub c1: C64,
    pub c2: C64,
    /// Half the angle between the incoming and outgoing tangents.
    pub alpha: f64,
    pub beta: f64,
}

impl TransitCoefficients {
    pub fn new(c1: C64, c2: C64, alpha: f64, beta: f64) -> Result<Self, EngineError> {
        let n = c1.norm_sqr() + c2.norm_sqr();
        if (n - 1.0).abs() > 1e-10 {
            return Err(EngineError::Invalid(format!("|c1|² + |c2|² = {n}, expected 1")));
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(EngineError::Invalid("non-finite transit angle".into()));
        }
        Ok(Self { c1, c2, alpha, beta })
    }
}

/// The transit map as stated:
/// `c1' = cos α c2 + e^{iβ} sin α c1`, `c2' = cos α c1 + e^{−iβ} sin α c2`.
/// It is not unitary for generic `(α, β)`.
pub fn crossing_transit(tc: &TransitCoefficients) -> (C64, C64) {
    let (s, c) = tc.alpha.sin_cos();
    let e = C64::from_polar(1.0, tc.beta);
    let c1 = tc.c2 * c + e * s * tc.c1;
    let c2 = tc.c1 * c + e.conj() * s * tc.c2;
    (c1, c2)
}

/// Half the angle between `ẋ(t*⁻)` and `ẋ(t*⁺)`.
pub fn bend_half_angle(path: &ParameterPath, t_star: f64) -> Result<f64, EngineError> {
    let (before, after) = tangents(path, t_star)?;
    let dot: f64 = before.iter().zip(&after).map(|(a, b)| a * b).sum();
    let na = before.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nb = after.iter().map(|a| a * a).sum::<f64>().sqrt();
    Ok(0.5 * (dot / (na * nb)).clamp(-1.0, 1.0).acos())
}

fn tangents(path: &ParameterPath, t_star: f64) -> Result<(Vec<f64>, Vec<f64>), EngineError> {
    let h = 1e-7 * (path.t1() - path.t0());
    let before = path.one_sided_velocity(t_star, -1, h);
    let after = path.one_sided_velocity(t_star, 1, h);
    let tiny = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt() < 1e-12;
    if tiny(&before) {
        return Err(EngineError::VanishingTangent { side: "incoming", t: t_star });
    }
    if tiny(&after) {
        return Err(EngineError::VanishingTangent { side: "outgoing", t: t_star });
    }
    Ok((before, after))
}

/// Offset in time used to sit just off the crossing point.
pub fn approach_offset(path: &ParameterPath) -> f64 {
    1e-4 * (path.t1() - path.t0())
}

/// `β = arg(⟨1|∂_i|2⟩|_{t*⁻} ẋ^i(t*⁺)) + π`, with eigenvectors in `gauge`
/// and `(upper, lower)` the ascending ranks of bands 1 and 2.
pub fn compute_beta<F: HamiltonianFamily + ?Sized>(
    family: &F,
    path: &ParameterPath,
    t_star: f64,
    pair: (usize, usize),
    gauge: &Gauge,
) -> Result<f64, EngineError> {
    let (_, after) = tangents(path, t_star)?;
    let x = path.position(t_star - approach_offset(path));
    let f = frame_at(family, &x)?;
    let (u, l) = pair;
    let v1 = phase_fixed(&f.vector(u), gauge, u)?;
    let v2 = phase_fixed(&f.vector(l), gauge, l)?;
    let gap = f.values[l] - f.values[u];
    let mut c = C64::new(0.0, 0.0);
    for (i, vi) in after.iter().enumerate() {
        c += inner(&v1, &(family.derivative(&x, i) * &v2)) / C64::new(gap, 0.0) * C64::new(*vi, 0.0);
    }
    Ok(c.arg() + std::f64::consts::PI)
}

/// Sudden-passage matrix `⟨a, x(t*⁺)|b, x(t*⁻)⟩` over the pair `(upper, lower)`,
/// rows and columns ordered (band 1, band 2), eigenvectors in `gauge`.
pub fn sudden_transit_matrix<F: HamiltonianFamily + ?Sized>(
    family: &F,
    path: &ParameterPath,
    t_star: f64,
    pair: (usize, usize),
    gauge: &Gauge,
) -> Result<CMatrix, EngineError> {
    let d = approach_offset(path);
    let fin = frame_at(family, &path.position(t_star - d))?;
    let fout = frame_at(family, &path.position(t_star + d))?;
    let ranks = [pair.0, pair.1];
    let vin: Vec<CVector> = ranks.iter().map(|&r| phase_fixed(&fin.vector(r), gauge, r)).collect::<Result<_, _>>()?;
    let vout: Vec<CVector> = ranks.iter().map(|&r| phase_fixed(&fout.vector(r), gauge, r)).collect::<Result<_, _>>()?;
    Ok(CMatrix::from_fn(2, 2, |a, b| inner(&vout[a], &vin[b])))
}
