use crate::{max_abs, CMatrix, SpectralError, C64};

/// Relative Hermiticity tolerance against the largest entry.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A dense square complex matrix verified to be Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    m: CMatrix,
}

impl HermitianOperator {
    pub fn new(m: CMatrix) -> Result<Self, SpectralError> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(SpectralError::Shape { rows: m.nrows(), cols: m.ncols() });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SpectralError::NonFinite);
        }
        let asym = asymmetry(&m);
        let scale = max_abs(&m);
        if asym > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) && asym > 0.0 {
            return Err(SpectralError::NotHermitian { asymmetry: asym, scale });
        }
        Ok(Self { m })
    }

    /// Symmetrises `(m + m†)/2` before validation. Callers use this for
    /// operators assembled from products where roundoff breaks exact symmetry.
    pub fn symmetrized(m: CMatrix) -> Result<Self, SpectralError> {
        let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        Self::new(h)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    /// Frobenius norm, used as the scale `‖H‖` in relative tolerances.
    pub fn norm(&self) -> f64 {
        self.m.norm()
    }
}

/// Largest `|m_ij − conj(m_ji)|`.
pub fn asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParameterPoint {
    coords: Vec<f64>,
}

impl ParameterPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self, SpectralError> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(SpectralError::NonFinite);
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

/// Pauli matrices `σ_x`, `σ_y`, `σ_z` for `k = 0, 1, 2`.
pub fn pauli(k: usize) -> CMatrix {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match k {
        0 => CMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        1 => CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        2 => CMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        _ => panic!("pauli index {k} out of range"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_hermitian_with_asymmetry() {
        let m = CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(0.0, 0.0)]);
        match HermitianOperator::new(m) {
            Err(SpectralError::NotHermitian { asymmetry, .. }) => assert!((asymmetry - 1.0).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_nan() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = C64::new(f64::NAN, 0.0);
        assert_eq!(HermitianOperator::new(m), Err(SpectralError::NonFinite));
    }

    #[test]
    fn accepts_paulis_and_zero() {
        for k in 0..3 {
            assert!(HermitianOperator::new(pauli(k)).is_ok());
        }
        assert!(HermitianOperator::new(CMatrix::zeros(3, 3)).is_ok());
    }

    #[test]
    fn point_rejects_infinite() {
        assert!(ParameterPoint::new(vec![0.0, f64::INFINITY]).is_err());
    }
}
