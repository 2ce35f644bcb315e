use spectral_core::{eigendecompose, CMatrix, CVector, HermitianOperator, C64};

use crate::OpenError;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

fn eigenvalues(m: &CMatrix) -> Vec<f64> {
    HermitianOperator::symmetrized(m.clone())
        .and_then(|h| eigendecompose(&h))
        .map(|f| f.values)
        .unwrap_or_else(|_| vec![f64::NAN; m.nrows()])
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self, OpenError> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(OpenError::NotDensity(format!("shape {}×{}", matrix.nrows(), matrix.ncols())));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(OpenError::NotDensity("non-finite entries".into()));
        }
        let asym = (&matrix - matrix.adjoint()).norm();
        if asym > HERMITIAN_TOL * matrix.norm().max(1.0) {
            return Err(OpenError::NotDensity(format!("anti-Hermitian part {asym:.3e}")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(OpenError::NotDensity(format!("trace {tr}")));
        }
        let lo = eigenvalues(&matrix).into_iter().fold(f64::INFINITY, f64::min);
        if lo < -POSITIVITY_TOL {
            return Err(OpenError::NotDensity(format!("eigenvalue {lo:.3e}")));
        }
        Ok(Self { matrix })
    }

    pub fn pure(psi: &CVector) -> Result<Self, OpenError> {
        Self::new(psi * psi.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut e = eigenvalues(&self.matrix);
        e.sort_by(f64::total_cmp);
        e
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `−tr ρ ln ρ` with `0 ln 0 = 0`.
    pub fn von_neumann_entropy(&self) -> f64 {
        entropy_of(&self.eigenvalues())
    }

    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        trace_distance(&self.matrix, &other.matrix)
    }
}

/// `−Σ p ln p` over the positive entries.
pub fn entropy_of(values: &[f64]) -> f64 {
    values.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum()
}

/// `½ Σ |eig(a − b)|` for Hermitian arguments.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let d = a - b;
    let h = (&d + d.adjoint()) * C64::new(0.5, 0.0);
    0.5 * eigenvalues(&h).iter().map(|e| e.abs()).sum::<f64>()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    System,
    Environment,
}

/// Partial trace of any operator on `ℂ^{d_S} ⊗ ℂ^{d_E}`, system index major.
pub fn partial_trace_matrix(m: &CMatrix, dims: (usize, usize), keep: Keep) -> Result<CMatrix, OpenError> {
    let (ds, de) = dims;
    if m.nrows() != ds * de || m.ncols() != ds * de {
        return Err(OpenError::Dimension(format!("{}×{} operator on {ds}⊗{de}", m.nrows(), m.ncols())));
    }
    Ok(match keep {
        Keep::System => CMatrix::from_fn(ds, ds, |i, j| (0..de).map(|e| m[(i * de + e, j * de + e)]).sum()),
        Keep::Environment => CMatrix::from_fn(de, de, |i, j| (0..ds).map(|s| m[(s * de + i, s * de + j)]).sum()),
    })
}

pub fn partial_trace(rho: &DensityMatrix, dims: (usize, usize), keep: Keep) -> Result<DensityMatrix, OpenError> {
    DensityMatrix::new(partial_trace_matrix(rho.matrix(), dims, keep)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::c64;

    fn ket(v: &[C64]) -> CVector {
        CVector::from_column_slice(v)
    }

    #[test]
    fn pure_and_maximally_mixed() {
        let p = DensityMatrix::pure(&ket(&[c64(0.6, 0.0), c64(0.0, 0.8)])).unwrap();
        assert!((p.purity() - 1.0).abs() < 1e-14 && p.von_neumann_entropy().abs() < 1e-12);
        let m = DensityMatrix::new(CMatrix::identity(2, 2) * c64(0.5, 0.0)).unwrap();
        assert!((m.purity() - 0.5).abs() < 1e-15);
        assert!((m.von_neumann_entropy() - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn skewed_diagonal() {
        let d = DensityMatrix::new(CMatrix::from_diagonal(&ket(&[c64(0.9, 0.0), c64(0.1, 0.0)]))).unwrap();
        assert!((d.purity() - 0.82).abs() < 1e-14);
        assert!((d.von_neumann_entropy() - 0.325_082_973_391_448_2).abs() < 1e-12);
    }

    #[test]
    fn bell_state_reduces_to_identity_half() {
        let s = 0.5f64.sqrt();
        let bell = ket(&[c64(s, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(s, 0.0)]);
        let r = partial_trace(&DensityMatrix::pure(&bell).unwrap(), (2, 2), Keep::System).unwrap();
        assert!((r.matrix() - CMatrix::identity(2, 2) * c64(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn product_state_traces_to_its_factor() {
        let rs = ket(&[c64(0.6, 0.0), c64(0.0, 0.8)]);
        let re = ket(&[c64(0.0, 0.6), c64(0.48, 0.0), c64(0.64, 0.0)]);
        let psi = rs.kronecker(&re);
        let tot = DensityMatrix::pure(&psi).unwrap();
        let s = partial_trace(&tot, (2, 3), Keep::System).unwrap();
        let e = partial_trace(&tot, (2, 3), Keep::Environment).unwrap();
        assert!((s.matrix() - &rs * rs.adjoint()).norm() < 1e-15);
        assert!((e.matrix() - &re * re.adjoint()).norm() < 1e-15);
    }

    #[test]
    fn invalid_matrices_are_refused() {
        assert!(DensityMatrix::new(CMatrix::identity(2, 2)).is_err());
        assert!(DensityMatrix::new(CMatrix::from_diagonal(&ket(&[c64(1.5, 0.0), c64(-0.5, 0.0)]))).is_err());
        let mut m = CMatrix::identity(2, 2) * c64(0.5, 0.0);
        m[(0, 1)] = c64(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        assert!(partial_trace_matrix(&CMatrix::identity(5, 5), (2, 3), Keep::System).is_err());
    }
}
