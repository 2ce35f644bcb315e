use spectral_core::{
    check_isolated, coupling_matrix, frame_at, inner, matched_vector, phase_fixed, pinned_gauge, CVector, Gauge,
    HamiltonianFamily, C64,
};

use crate::GeometryError;

/// `A_i = −i⟨a|∂_i a⟩` at one point. Depends on the gauge.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionSample {
    pub point: Vec<f64>,
    pub band: usize,
    pub dirs: Vec<usize>,
    pub a: Vec<f64>,
    pub gauge: Gauge,
}

/// `F_ij` for every pair `i < j`, by two independent routes.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureSample {
    pub point: Vec<f64>,
    pub band: usize,
    pub pairs: Vec<(usize, usize)>,
    /// Central-difference curl of the connection.
    pub curl: Vec<f64>,
    /// `2 Im Σ_{b≠a} conj(⟨b|∂_i a⟩)⟨b|∂_j a⟩` from Hellmann–Feynman couplings.
    pub sum_over_states: Vec<f64>,
    pub discrepancy: f64,
    /// Routes disagree beyond `CURVATURE_TOL`.
    pub flagged: bool,
}

impl CurvatureSample {
    pub fn component(&self, i: usize, j: usize) -> Option<f64> {
        let (p, s) = if i < j { ((i, j), 1.0) } else { ((j, i), -1.0) };
        self.pairs.iter().position(|q| *q == p).map(|k| s * self.sum_over_states[k])
    }
}

/// Absolute plus relative agreement demanded of the two curvature routes.
pub const CURVATURE_TOL: f64 = 1e-5;

pub fn berry_connection<F: HamiltonianFamily + ?Sized>(
    family: &F,
    x: &[f64],
    band: usize,
    dirs: &[usize],
    gauge: &Gauge,
) -> Result<ConnectionSample, GeometryError> {
    twisted_connection(family, x, band, dirs, gauge, &|_: &[f64]| 0.0)
}

/// Connection of the section `e^{iχ(x)}|a,x⟩`, with `|a,x⟩` fixed by `gauge`.
pub fn twisted_connection<F: HamiltonianFamily + ?Sized>(
    family: &F,
    x: &[f64],
    band: usize,
    dirs: &[usize],
    gauge: &Gauge,
    twist: &dyn Fn(&[f64]) -> f64,
) -> Result<ConnectionSample, GeometryError> {
    if x.len() != family.n_params() {
        return Err(GeometryError::Invalid(format!("point has {} coordinates, family {}", x.len(), family.n_params())));
    }
    if let Some(&d) = dirs.iter().find(|&&d| d >= x.len()) {
        return Err(GeometryError::Invalid(format!("direction {d} out of range")));
    }
    let center = frame_at(family, x)?;
    center.check_band(band)?;
    check_isolated(family, &center, band)?;
    let g = pinned_gauge(&center, band, gauge);
    let section = |y: &[f64]| -> Result<CVector, GeometryError> {
        let v = matched_vector(family, y, &center, band, &g)?;
        Ok(v * C64::from_polar(1.0, twist(y)))
    };
    let v0 = phase_fixed(&center.vector(band), &g, band)? * C64::from_polar(1.0, twist(x));
    let h = family.fd_step();
    let a = dirs
        .iter()
        .map(|&i| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            let dv = (section(&xp)? - section(&xm)?) / C64::new(2.0 * h, 0.0);
            Ok((C64::new(0.0, -1.0) * inner(&v0, &dv)).re)
        })
        .collect::<Result<Vec<f64>, GeometryError>>()?;
    Ok(ConnectionSample { point: x.to_vec(), band, dirs: dirs.to_vec(), a, gauge: g })
}

pub fn berry_curvature<F: HamiltonianFamily + ?Sized>(family: &F, x: &[f64], band: usize) -> Result<CurvatureSample, GeometryError> {
    berry_curvature_step(family, x, band, 10.0 * family.fd_step())
}

/// As [`berry_curvature`] with an explicit outer step for the curl.
pub fn berry_curvature_step<F: HamiltonianFamily + ?Sized>(
    family: &F,
    x: &[f64],
    band: usize,
    step: f64,
) -> Result<CurvatureSample, GeometryError> {
    let n = family.n_params();
    if x.len() != n || n < 2 {
        return Err(GeometryError::Invalid("curvature needs a point with at least two coordinates".into()));
    }
    let frame = frame_at(family, x)?;
    frame.check_band(band)?;
    check_isolated(family, &frame, band)?;
    let gauge = pinned_gauge(&frame, band, &Gauge::LargestComponent);
    let ks = (0..n).map(|i| coupling_matrix(family, &frame, i)).collect::<Result<Vec<_>, _>>()?;
    let all: Vec<usize> = (0..n).collect();
    let shifted = |i: usize, s: f64| -> Result<Vec<f64>, GeometryError> {
        let mut y = x.to_vec();
        y[i] += s;
        Ok(berry_connection(family, &y, band, &all, &gauge)?.a)
    };
    let mut plus = Vec::with_capacity(n);
    let mut minus = Vec::with_capacity(n);
    for i in 0..n {
        plus.push(shifted(i, step)?);
        minus.push(shifted(i, -step)?);
    }
    let mut pairs = Vec::new();
    let mut curl = Vec::new();
    let mut sos = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
            let di_aj = (plus[i][j] - minus[i][j]) / (2.0 * step);
            let dj_ai = (plus[j][i] - minus[j][i]) / (2.0 * step);
            curl.push(di_aj - dj_ai);
            let mut s = 0.0;
            for b in 0..frame.dim() {
                if b != band {
                    s += 2.0 * (ks[i][(b, band)].conj() * ks[j][(b, band)]).im;
                }
            }
            sos.push(s);
        }
    }
    let discrepancy = curl.iter().zip(&sos).map(|(c, s)| (c - s).abs()).fold(0.0, f64::max);
    let scale = sos.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let flagged = discrepancy > CURVATURE_TOL * (1.0 + scale);
    Ok(CurvatureSample { point: x.to_vec(), band, pairs, curl, sum_over_states: sos, discrepancy, flagged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::{c64, pauli, ConicalModel, FnFamily, SpinField};

    #[test]
    fn upper_connection_of_the_cone() {
        let s = berry_connection(&ConicalModel, &[0.0, 1.0], 1, &[0, 1], &Gauge::LargestComponent).unwrap();
        assert!((s.a[0] + 0.5).abs() < 1e-6 && s.a[1].abs() < 1e-6);
    }

    #[test]
    fn fixed_eigenvectors_carry_no_connection() {
        let fam = FnFamily::new(2, 2, |x: &[f64]| pauli(2) * c64(1.0 + x[0] * x[0] + x[1].sin(), 0.0));
        let s = berry_connection(&fam, &[0.3, -0.2], 0, &[0, 1], &Gauge::LargestComponent).unwrap();
        assert!(s.a.iter().all(|a| a.abs() < 1e-12));
    }

    #[test]
    fn twist_adds_its_gradient() {
        let x = [0.6, -0.8];
        let base = berry_connection(&ConicalModel, &x, 0, &[0, 1], &Gauge::Component(0)).unwrap();
        let tw = twisted_connection(&ConicalModel, &x, 0, &[0, 1], &Gauge::Component(0), &|y: &[f64]| y[0] * y[1]).unwrap();
        assert!((tw.a[0] - base.a[0] - x[1]).abs() < 1e-6);
        assert!((tw.a[1] - base.a[1] - x[0]).abs() < 1e-6);
    }

    #[test]
    fn cone_is_flat_off_the_origin() {
        for band in [0, 1] {
            let f = berry_curvature(&ConicalModel, &[1.0, 1.0], band).unwrap();
            assert!(f.curl[0].abs() < 1e-6 && f.sum_over_states[0].abs() < 1e-6, "{f:?}");
            assert!(!f.flagged);
        }
    }

    #[test]
    fn monopole_curvature_at_the_north_pole() {
        let f = berry_curvature(&SpinField::default(), &[0.0, 0.0, 1.0], 0).unwrap();
        let xy = f.component(0, 1).unwrap();
        assert!((xy + 0.5).abs() < 1e-6, "{f:?}");
        assert!((f.curl[0] + 0.5).abs() < 1e-6);
        assert_eq!(f.component(1, 0), Some(-xy));
        let up = berry_curvature(&SpinField::default(), &[0.0, 0.0, 1.0], 1).unwrap();
        assert!((up.component(0, 1).unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn degeneracy_is_refused() {
        assert!(berry_connection(&ConicalModel, &[0.0, 0.0], 0, &[0], &Gauge::LargestComponent).is_err());
        assert!(berry_curvature(&ConicalModel, &[0.0, 0.0], 0).is_err());
    }
}
