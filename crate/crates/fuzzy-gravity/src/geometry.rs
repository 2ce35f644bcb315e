use spectral_core::{c64, max_abs, operator::asymmetry, CMatrix, CVector, C64};

use crate::fock::FockSpace;
use crate::FuzzyError;

/// Hermitian coordinate operators `X¹, X², X³` together with the sizes of the
/// spin-up and spin-down blocks of the Dirac space `ℂ² ⊗ H`.
///
/// The coordinate matrices live on an ambient space at least as large as
/// either block; every operator on the Dirac space is assembled in the
/// ambient space and then restricted blockwise.
#[derive(Clone, Debug)]
pub struct FuzzyGeometry {
    pub coords: [CMatrix; 3],
    pub up: usize,
    pub down: usize,
}

/// Ambient padding for the built-in Fock geometries, so products of two
/// coordinates are exact on both blocks.
const PAD: usize = 4;

impl FuzzyGeometry {
    /// General triple acting on `ℂ² ⊗ ℂᴹ`.
    pub fn from_triple(coords: [CMatrix; 3]) -> Result<Self, FuzzyError> {
        let m = coords[0].nrows();
        for (k, c) in coords.iter().enumerate() {
            if c.nrows() != m || c.ncols() != m {
                return Err(FuzzyError::Dimension(format!("coordinate {k} is {}x{}, expected {m}x{m}", c.nrows(), c.ncols())));
            }
            let asym = asymmetry(c);
            if asym > 1e-12 * max_abs(c).max(1.0) {
                return Err(FuzzyError::Invalid(format!("coordinate {k} is not Hermitian (asymmetry {asym:.3e})")));
            }
        }
        Ok(Self { coords, up: m, down: m })
    }

    /// Noncommutative plane: `X = (a + a†)/2`, `Y = (a − a†)/(2i)`, `Z = 0`.
    /// The spin-down block keeps one Fock state fewer, so `a − α` maps the
    /// up block onto the down block without truncation error.
    pub fn plane(n: usize) -> Result<Self, FuzzyError> {
        Self::fock_built(n, |_| 0.0)
    }

    /// Fock geometry with `Z = Σ height(n)|n⟩⟨n|`.
    pub fn fock_built(n: usize, height: impl Fn(usize) -> f64) -> Result<Self, FuzzyError> {
        let fock = FockSpace::new(n + PAD)?;
        if n < 2 {
            return Err(FuzzyError::Truncation(n));
        }
        let (x, y) = fock.plane_coordinates();
        let z = CMatrix::from_diagonal(&CVector::from_iterator(n + PAD, (0..n + PAD).map(|k| c64(height(k), 0.0))));
        Ok(Self { coords: [x, y, z], up: n, down: n - 1 })
    }

    pub fn dim(&self) -> usize {
        self.up + self.down
    }

    pub fn ambient(&self) -> usize {
        self.coords[0].nrows()
    }

    /// `o₀ ⊗ id + Σ σ_k ⊗ o_k`, restricted to the spin blocks.
    pub fn spin_assemble(&self, o0: &CMatrix, ox: &CMatrix, oy: &CMatrix, oz: &CMatrix) -> CMatrix {
        let (u, d) = (self.up, self.down);
        let i = c64(0.0, 1.0);
        let uu = o0 + oz;
        let ud = ox - oy * i;
        let du = ox + oy * i;
        let dd = o0 - oz;
        let mut m = CMatrix::zeros(u + d, u + d);
        m.view_mut((0, 0), (u, u)).copy_from(&uu.view((0, 0), (u, u)));
        m.view_mut((0, u), (u, d)).copy_from(&ud.view((0, 0), (u, d)));
        m.view_mut((u, 0), (d, u)).copy_from(&du.view((0, 0), (d, u)));
        m.view_mut((u, u), (d, d)).copy_from(&dd.view((0, 0), (d, d)));
        m
    }

    /// `X^i − x^i` on the ambient space.
    pub fn displaced(&self, x: &[f64; 3]) -> [CMatrix; 3] {
        let id = CMatrix::identity(self.ambient(), self.ambient());
        [0, 1, 2].map(|k| &self.coords[k] - &id * c64(x[k], 0.0))
    }

    /// Displacement-energy operator `σ_i ⊗ (X^i − x^i)` in Planck units.
    pub fn dirac(&self, x: &[f64; 3]) -> CMatrix {
        let [dx, dy, dz] = self.displaced(x);
        let zero = CMatrix::zeros(self.ambient(), self.ambient());
        self.spin_assemble(&zero, &dx, &dy, &dz)
    }

    /// `id ⊗ ‖X − x‖²`.
    pub fn distance_squared(&self, x: &[f64; 3]) -> CMatrix {
        let [dx, dy, dz] = self.displaced(x);
        let q = &dx * &dx + &dy * &dy + &dz * &dz;
        let zero = CMatrix::zeros(self.ambient(), self.ambient());
        self.spin_assemble(&q, &zero, &zero, &zero)
    }

    /// `(1/4) Σ_ij [σ_i, σ_j] ⊗ [X^i, X^j] = i Σ_k σ_k ⊗ ½ε_ijk[X^i, X^j]`.
    pub fn noncommutative_term(&self) -> CMatrix {
        let [x, y, z] = &self.coords;
        let comm = |a: &CMatrix, b: &CMatrix| (a * b - b * a) * c64(0.0, 1.0);
        let zero = CMatrix::zeros(self.ambient(), self.ambient());
        self.spin_assemble(&zero, &comm(y, z), &comm(z, x), &comm(x, y))
    }

    /// `⟨σ⟩` of a vector on the Dirac space.
    pub fn spin(&self, v: &CVector) -> [f64; 3] {
        spin_of(v, self.up, self.down)
    }
}

pub(crate) fn spin_of(v: &CVector, up: usize, down: usize) -> [f64; 3] {
    let u = v.rows(0, up);
    let d = v.rows(up, down);
    let mut cross = C64::new(0.0, 0.0);
    for k in 0..up.min(down) {
        cross += u[k].conj() * d[k];
    }
    [2.0 * cross.re, 2.0 * cross.im, u.norm_squared() - d.norm_squared()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::pauli;

    fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
        a.kronecker(b)
    }

    #[test]
    fn triple_matches_the_tensor_form() {
        let f = FockSpace::new(5).unwrap();
        let (x, y) = f.plane_coordinates();
        let z = f.number() * c64(0.3, 0.0);
        let g = FuzzyGeometry::from_triple([x.clone(), y.clone(), z.clone()]).unwrap();
        let p = [0.2, -0.7, 0.4];
        let id = CMatrix::identity(5, 5);
        let want = kron(&pauli(0), &(&x - &id * c64(p[0], 0.0)))
            + kron(&pauli(1), &(&y - &id * c64(p[1], 0.0)))
            + kron(&pauli(2), &(&z - &id * c64(p[2], 0.0)));
        assert!((g.dirac(&p) - want).norm() < 1e-13);
    }

    #[test]
    fn square_splits_into_distance_and_commutator() {
        let f = FockSpace::new(6).unwrap();
        let (x, y) = f.plane_coordinates();
        let z = CMatrix::from_diagonal(&CVector::from_iterator(6, (0..6).map(|k| c64((k as f64).sqrt(), 0.0))));
        let g = FuzzyGeometry::from_triple([x, y, z]).unwrap();
        let p = [0.5, 0.1, -0.2];
        let d = g.dirac(&p);
        let lhs = &d * &d;
        let rhs = g.distance_squared(&p) + g.noncommutative_term();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn non_hermitian_triple_is_rejected() {
        let mut bad = CMatrix::zeros(2, 2);
        bad[(0, 1)] = c64(1.0, 0.0);
        let ok = CMatrix::identity(2, 2);
        assert!(FuzzyGeometry::from_triple([bad, ok.clone(), ok]).is_err());
    }

    #[test]
    fn plane_blocks_are_asymmetric() {
        let g = FuzzyGeometry::plane(8).unwrap();
        assert_eq!((g.up, g.down, g.dim()), (8, 7, 15));
        let d = g.dirac(&[0.0; 3]);
        assert!((&d - d.adjoint()).norm() < 1e-14);
    }
}
