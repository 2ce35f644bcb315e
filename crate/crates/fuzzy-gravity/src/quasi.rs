use spectral_core::{eigendecompose, inner, CMatrix, CVector, HermitianOperator, C64};

use crate::geometry::FuzzyGeometry;
use crate::FuzzyError;

/// Eigen-residual above which a quasi-coherent solve is rejected.
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: CVector,
    /// `‖Dv − λv‖`.
    pub residual: f64,
}

/// The `count` eigenpairs of least modulus, ordered by `|λ|` then by `λ`.
pub fn minimal_modulus(d: &CMatrix, count: usize) -> Result<Vec<Eigenpair>, FuzzyError> {
    let op = HermitianOperator::symmetrized(d.clone())?;
    let frame = eigendecompose(&op)?;
    if count == 0 || count > frame.dim() {
        return Err(FuzzyError::Invalid(format!("cannot take {count} of {} eigenpairs", frame.dim())));
    }
    let mut order: Vec<usize> = (0..frame.dim()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (frame.values[i], frame.values[j]);
        a.abs().total_cmp(&b.abs()).then(a.total_cmp(&b))
    });
    order
        .into_iter()
        .take(count)
        .map(|k| {
            let v = frame.vector(k);
            let value = frame.values[k];
            let residual = (op.matrix() * &v - &v * C64::new(value, 0.0)).norm();
            if residual > RESIDUAL_TOL * op.norm().max(1.0) {
                return Err(FuzzyError::Invalid(format!("eigen-residual {residual:.3e} at λ = {value}")));
            }
            Ok(Eigenpair { value, vector: v, residual })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct QuasiCoherent {
    pub point: [f64; 3],
    pub lambda: f64,
    pub state: CVector,
    pub residual: f64,
    /// `⟨σ⟩`, the local orientation.
    pub normal: [f64; 3],
    /// Distance of `λ` to the next modulus in the spectrum.
    pub gap: f64,
}

/// Minimal displacement-energy state of `geometry` at `x`.
pub fn quasi_coherent(geometry: &FuzzyGeometry, x: &[f64; 3]) -> Result<QuasiCoherent, FuzzyError> {
    let pairs = minimal_modulus(&geometry.dirac(x), 2)?;
    let gap = pairs[1].value.abs() - pairs[0].value.abs();
    let p = &pairs[0];
    Ok(QuasiCoherent {
        point: *x,
        lambda: p.value,
        normal: geometry.spin(&p.vector),
        state: p.vector.clone(),
        residual: p.residual,
        gap,
    })
}

/// The state at `x` closest to `reference`, rotated so that the overlap is real positive.
/// The candidates are the few eigenvectors of least modulus.
pub(crate) fn follow(geometry: &FuzzyGeometry, x: &[f64; 3], reference: &CVector) -> Result<CVector, FuzzyError> {
    let d = geometry.dirac(x);
    let pairs = minimal_modulus(&d, 4.min(d.nrows()))?;
    let best = pairs
        .iter()
        .max_by(|a, b| inner(reference, &a.vector).norm().total_cmp(&inner(reference, &b.vector).norm()))
        .ok_or_else(|| FuzzyError::Stencil("empty spectrum".into()))?;
    let o = inner(reference, &best.vector);
    if o.norm() < 0.5 {
        return Err(FuzzyError::Stencil(format!("overlap {:.3} with the reference state at {x:?}", o.norm())));
    }
    Ok(&best.vector * (o.conj() / o.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::coherent_state;
    use spectral_core::c64;

    #[test]
    fn plane_zero_mode_is_the_coherent_state() {
        let g = FuzzyGeometry::plane(64).unwrap();
        for (x, y) in [(0.0, 0.0), (1.0, 0.5), (-2.1, 1.7)] {
            let q = quasi_coherent(&g, &[x, y, 0.0]).unwrap();
            assert!(q.lambda.abs() < 1e-10, "{}", q.lambda);
            let c = coherent_state(c64(x, y), 64).unwrap();
            let up = q.state.rows(0, 64).into_owned();
            assert!(1.0 - inner(&c.vector, &up).norm_sqr() < 1e-10);
            assert!((q.normal[2] - 1.0).abs() < 1e-10 && q.normal[0].abs() < 1e-10);
        }
    }

    #[test]
    fn energy_grows_off_the_plane() {
        let g = FuzzyGeometry::plane(48).unwrap();
        let mut last = -1.0;
        for h in [0.0, 0.5, 1.0, 2.0] {
            let q = quasi_coherent(&g, &[0.3, 0.2, h]).unwrap();
            assert!(q.lambda.abs() > last);
            last = q.lambda.abs();
        }
    }

    #[test]
    fn ordering_is_by_modulus() {
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(-3.0, 0.0), c64(0.5, 0.0), c64(-0.2, 0.0), c64(2.0, 0.0)]));
        let p = minimal_modulus(&d, 3).unwrap();
        let v: Vec<f64> = p.iter().map(|e| e.value).collect();
        assert_eq!(v, vec![-0.2, 0.5, 2.0]);
    }
}
