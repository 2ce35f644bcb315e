use nalgebra::SymmetricEigen;

use crate::{inner, CMatrix, CVector, HamiltonianFamily, HermitianOperator, SpectralError, C64};

/// Relative window inside which two component moduli count as tied.
const TIE_WINDOW: f64 = 1e-8;

/// Below this modulus a reference overlap cannot define a phase.
const PHASE_FLOOR: f64 = 1e-12;

/// Minimum overlap accepted when matching bands to a reference frame.
pub const MATCH_THRESHOLD: f64 = 0.5;

/// Phase convention applied to the eigenvector columns of a frame.
#[derive(Clone, Debug, PartialEq)]
pub enum Gauge {
    /// Largest-modulus component real positive, ties to the lowest index.
    LargestComponent,
    /// Component `k` real positive for every band.
    Component(usize),
    /// `⟨w, v_a⟩` real positive for every band, with one shared `w`.
    Section(CVector),
    /// `⟨w_a, v_a⟩` real positive with one reference per band.
    Sections(Vec<CVector>),
    /// Phases and order inherited from a reference frame by overlap matching.
    Matched,
}

impl Gauge {
    pub fn describe(&self) -> String {
        match self {
            Gauge::LargestComponent => "largest-component".into(),
            Gauge::Component(k) => format!("component-{k}"),
            Gauge::Section(_) => "section".into(),
            Gauge::Sections(_) => "per-band-section".into(),
            Gauge::Matched => "matched".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenFrame {
    pub point: Vec<f64>,
    pub values: Vec<f64>,
    /// Eigenvectors stored as columns.
    pub vectors: CMatrix,
    pub gauge: Gauge,
}

impl EigenFrame {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, band: usize) -> CVector {
        self.vectors.column(band).into_owned()
    }

    pub fn check_band(&self, band: usize) -> Result<(), SpectralError> {
        if band >= self.dim() {
            return Err(SpectralError::BandOutOfRange { band, dim: self.dim() });
        }
        Ok(())
    }

    /// Re-phases every column according to `gauge`.
    pub fn with_gauge(&self, gauge: &Gauge) -> Result<EigenFrame, SpectralError> {
        let mut out = self.clone();
        for a in 0..self.dim() {
            let v = self.vector(a);
            let fixed = phase_fixed(&v, gauge, a)?;
            out.vectors.set_column(a, &fixed);
        }
        out.gauge = gauge.clone();
        Ok(out)
    }

    /// Re-phases a single band, leaving the others untouched.
    pub fn with_band_gauge(&self, band: usize, gauge: &Gauge) -> Result<EigenFrame, SpectralError> {
        self.check_band(band)?;
        let mut out = self.clone();
        let fixed = phase_fixed(&self.vector(band), gauge, band)?;
        out.vectors.set_column(band, &fixed);
        Ok(out)
    }

    /// `Σ λ_a v_a v_a†`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        let mut h = CMatrix::zeros(n, n);
        for a in 0..n {
            let v = self.vector(a);
            h += (&v * v.adjoint()) * C64::new(self.values[a], 0.0);
        }
        h
    }

    /// Index of the largest-modulus component of band `a`, ties to the lowest index.
    pub fn dominant_component(&self, band: usize) -> usize {
        dominant_index(&self.vector(band))
    }
}

pub(crate) fn dominant_index(v: &CVector) -> usize {
    let top = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    v.iter()
        .position(|z| z.norm() >= top * (1.0 - TIE_WINDOW))
        .unwrap_or(0)
}

fn rotate_real_positive(v: &CVector, anchor: C64, band: usize) -> Result<CVector, SpectralError> {
    let m = anchor.norm();
    if m < PHASE_FLOOR {
        return Err(SpectralError::GaugeUndefined { band, overlap: m });
    }
    Ok(v * (anchor.conj() / m))
}

/// Phase-fixed copy of `v` (the eigenvector of band `band`) under `gauge`.
pub fn phase_fixed(v: &CVector, gauge: &Gauge, band: usize) -> Result<CVector, SpectralError> {
    match gauge {
        Gauge::LargestComponent => {
            let k = dominant_index(v);
            rotate_real_positive(v, v[k], band)
        }
        Gauge::Component(k) => {
            if *k >= v.len() {
                return Err(SpectralError::BandOutOfRange { band: *k, dim: v.len() });
            }
            rotate_real_positive(v, v[*k], band)
        }
        Gauge::Section(w) => rotate_real_positive(v, inner(w, v), band),
        Gauge::Sections(ws) => {
            let w = ws.get(band).ok_or(SpectralError::BandOutOfRange { band, dim: ws.len() })?;
            rotate_real_positive(v, inner(w, v), band)
        }
        Gauge::Matched => Ok(v.clone()),
    }
}

/// Full spectrum in ascending order with the largest-component gauge.
pub fn eigendecompose(h: &HermitianOperator) -> Result<EigenFrame, SpectralError> {
    let n = h.dim();
    let eig = SymmetricEigen::new(h.matrix().clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(SpectralError::NonFinite);
    }
    let mut vectors = CMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(k).into_owned();
        let v = &v / C64::new(v.norm(), 0.0);
        vectors.set_column(col, &v);
    }
    let frame = EigenFrame { point: Vec::new(), values, vectors, gauge: Gauge::Matched };
    frame.with_gauge(&Gauge::LargestComponent)
}

/// Eigenframe of `family` at `x`.
pub fn frame_at<F: HamiltonianFamily + ?Sized>(family: &F, x: &[f64]) -> Result<EigenFrame, SpectralError> {
    let h = HermitianOperator::new(family.hamiltonian(x))?;
    let mut f = eigendecompose(&h)?;
    f.point = x.to_vec();
    Ok(f)
}

/// Without a reference: largest-component gauge. With a reference: columns
/// permuted to maximise `|⟨v_ref_a, v⟩|` and phased so that overlap is real positive.
pub fn gauge_fix(frame: &EigenFrame, reference: Option<&EigenFrame>) -> Result<EigenFrame, SpectralError> {
    let Some(r) = reference else {
        return frame.with_gauge(&Gauge::LargestComponent);
    };
    if r.dim() != frame.dim() {
        return Err(SpectralError::DimensionMismatch { expected: r.dim(), found: frame.dim() });
    }
    let n = frame.dim();
    let overlaps = r.vectors.adjoint() * &frame.vectors;
    let assignment = match_bands(&overlaps)?;
    let mut out = frame.clone();
    for (a, &b) in assignment.iter().enumerate() {
        let v = frame.vector(b);
        let fixed = rotate_real_positive(&v, overlaps[(a, b)], a)?;
        out.vectors.set_column(a, &fixed);
        out.values[a] = frame.values[b];
    }
    debug_assert_eq!(out.values.len(), n);
    out.gauge = Gauge::Matched;
    Ok(out)
}

/// Greedy max-modulus assignment of reference rows to frame columns.
fn match_bands(overlaps: &CMatrix) -> Result<Vec<usize>, SpectralError> {
    let n = overlaps.nrows();
    let mut rows: Vec<(usize, f64)> = (0..n)
        .map(|a| (a, (0..n).map(|b| overlaps[(a, b)].norm()).fold(0.0, f64::max)))
        .collect();
    rows.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    let mut taken = vec![false; n];
    let mut assignment = vec![usize::MAX; n];
    for (a, _) in rows {
        let mut best = None;
        let mut best_val = -1.0;
        for b in 0..n {
            let val = overlaps[(a, b)].norm();
            if !taken[b] && val > best_val {
                best = Some(b);
                best_val = val;
            }
        }
        let b = best.expect("square overlap matrix");
        if best_val < MATCH_THRESHOLD {
            return Err(SpectralError::AmbiguousMatching { band: a, overlap: best_val });
        }
        taken[b] = true;
        assignment[a] = b;
    }
    Ok(assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{c64, ConicalModel};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = CMatrix::from_fn(n, n, |_, _| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (&r + r.adjoint()) * c64(0.5, 0.0)
    }

    #[test]
    fn two_level_at_unit_x() {
        let h = HermitianOperator::new(ConicalModel.hamiltonian(&[1.0, 0.0])).unwrap();
        let f = eigendecompose(&h).unwrap();
        assert!((f.values[0] + 1.0).abs() < 1e-14);
        assert!((f.values[1] - 1.0).abs() < 1e-14);
        let s = 1.0 / 2f64.sqrt();
        assert!((f.vector(1) - CVector::from_vec(vec![c64(s, 0.0), c64(s, 0.0)])).norm() < 1e-14);
    }

    #[test]
    fn zero_matrix_gives_orthonormal_triple() {
        let f = eigendecompose(&HermitianOperator::new(CMatrix::zeros(3, 3)).unwrap()).unwrap();
        assert_eq!(f.values, vec![0.0; 3]);
        let g = f.vectors.adjoint() * &f.vectors;
        assert!((g - CMatrix::identity(3, 3)).norm() < 1e-14);
    }

    #[test]
    fn random_six_by_six_reconstructs() {
        for seed in 0..10 {
            let m = random_hermitian(6, seed);
            let f = eigendecompose(&HermitianOperator::new(m.clone()).unwrap()).unwrap();
            assert!((f.reconstruct() - &m).norm() < 1e-10 * m.norm());
            assert!(f.values.windows(2).all(|w| w[0] <= w[1]));
            for a in 0..6 {
                let v = f.vector(a);
                let r = &m * &v - &v * c64(f.values[a], 0.0);
                assert!(r.norm() < 1e-10 * m.norm());
            }
        }
    }

    #[test]
    fn eigendecompose_is_deterministic() {
        let m = random_hermitian(5, 42);
        let h = HermitianOperator::new(m).unwrap();
        assert_eq!(eigendecompose(&h).unwrap(), eigendecompose(&h).unwrap());
    }

    #[test]
    fn largest_component_gauge_of_imaginary_vector() {
        let v = CVector::from_vec(vec![c64(0.0, 1.0), c64(0.0, 0.0)]);
        let fixed = phase_fixed(&v, &Gauge::LargestComponent, 0).unwrap();
        assert_eq!(fixed, CVector::from_vec(vec![c64(1.0, 0.0), c64(0.0, 0.0)]));
    }

    #[test]
    fn tie_goes_to_lowest_index() {
        let s = 1.0 / 2f64.sqrt();
        let v = CVector::from_vec(vec![c64(0.0, s), c64(s, 0.0)]);
        let fixed = phase_fixed(&v, &Gauge::LargestComponent, 0).unwrap();
        assert!((fixed[0] - c64(s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn matching_to_itself_is_identity() {
        let f = frame_at(&ConicalModel, &[0.3, -0.7]).unwrap();
        let g = gauge_fix(&f, Some(&f)).unwrap();
        assert!((g.vectors - &f.vectors).norm() < 1e-14);
        assert_eq!(g.values, f.values);
    }

    #[test]
    fn matching_on_the_circle() {
        let th: f64 = 0.4;
        let a = frame_at(&ConicalModel, &[th.cos(), th.sin()]).unwrap();
        let th2: f64 = th + 0.01;
        let b = frame_at(&ConicalModel, &[th2.cos(), th2.sin()]).unwrap();
        let m = gauge_fix(&b, Some(&a)).unwrap();
        for k in 0..2 {
            let o = inner(&a.vector(k), &m.vector(k));
            assert!(o.im.abs() < 1e-14 && o.re > 0.0);
            assert!((1.0 - o.re) < 1e-4 && (1.0 - o.re) > 1e-6);
        }
    }

    #[test]
    fn matching_follows_bands_across_swap() {
        // Swapping columns of the reference must swap the matched values.
        let f = frame_at(&ConicalModel, &[0.2, 0.9]).unwrap();
        let mut r = f.clone();
        r.vectors.swap_columns(0, 1);
        r.values.swap(0, 1);
        let g = gauge_fix(&f, Some(&r)).unwrap();
        assert!(g.values[0] > g.values[1]);
    }

    #[test]
    fn matching_rejects_spread_overlaps() {
        let n = 5;
        let dft = CMatrix::from_fn(n, n, |j, k| {
            let ph = 2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64;
            c64(ph.cos(), ph.sin()) / (n as f64).sqrt()
        });
        let base = EigenFrame { point: vec![], values: vec![0.0; n], vectors: CMatrix::identity(n, n), gauge: Gauge::Matched };
        let other = EigenFrame { vectors: dft, ..base.clone() };
        let res = gauge_fix(&other, Some(&base));
        assert!(matches!(res, Err(SpectralError::AmbiguousMatching { .. })));
    }

}
