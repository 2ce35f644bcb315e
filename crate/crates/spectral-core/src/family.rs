use crate::{pauli, CMatrix, C64};

/// Default central finite-difference step in control units.
pub const FD_STEP: f64 = 1e-4;

/// A smooth map from control points to Hermitian matrices of fixed size.
pub trait HamiltonianFamily: Send + Sync {
    fn dim(&self) -> usize;
    fn n_params(&self) -> usize;
    fn hamiltonian(&self, x: &[f64]) -> CMatrix;

    fn fd_step(&self) -> f64 {
        FD_STEP
    }

    /// `∂H/∂x^i`, by central difference unless overridden.
    fn derivative(&self, x: &[f64], i: usize) -> CMatrix {
        let h = self.fd_step();
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        (self.hamiltonian(&xp) - self.hamiltonian(&xm)) / C64::new(2.0 * h, 0.0)
    }
}

impl<T: HamiltonianFamily + ?Sized> HamiltonianFamily for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn n_params(&self) -> usize {
        (**self).n_params()
    }
    fn hamiltonian(&self, x: &[f64]) -> CMatrix {
        (**self).hamiltonian(x)
    }
    fn fd_step(&self) -> f64 {
        (**self).fd_step()
    }
    fn derivative(&self, x: &[f64], i: usize) -> CMatrix {
        (**self).derivative(x, i)
    }
}

/// Two-level conical crossing `[[0, x − iy], [x + iy, 0]] = x σ_x + y σ_y`.
///
/// Eigenvalues `±r`, eigenvectors `(1, ±e^{iθ})/√2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ConicalModel;

impl HamiltonianFamily for ConicalModel {
    fn dim(&self) -> usize {
        2
    }
    fn n_params(&self) -> usize {
        2
    }
    fn hamiltonian(&self, x: &[f64]) -> CMatrix {
        let o = C64::new(0.0, 0.0);
        CMatrix::from_row_slice(2, 2, &[o, C64::new(x[0], -x[1]), C64::new(x[0], x[1]), o])
    }
    fn derivative(&self, _x: &[f64], i: usize) -> CMatrix {
        pauli(i)
    }
}

/// `s · x·σ` on three parameters; a unit monopole at the origin.
#[derive(Clone, Copy, Debug)]
pub struct SpinField {
    pub scale: f64,
}

impl Default for SpinField {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

impl HamiltonianFamily for SpinField {
    fn dim(&self) -> usize {
        2
    }
    fn n_params(&self) -> usize {
        3
    }
    fn hamiltonian(&self, x: &[f64]) -> CMatrix {
        (pauli(0) * C64::new(x[0], 0.0) + pauli(1) * C64::new(x[1], 0.0) + pauli(2) * C64::new(x[2], 0.0))
            * C64::new(self.scale, 0.0)
    }
    fn derivative(&self, _x: &[f64], i: usize) -> CMatrix {
        pauli(i) * C64::new(self.scale, 0.0)
    }
}

/// Two conical crossings of equal charge at `(±d, 0, 0)`:
/// `f = (Re(w² − d²), Im(w² − d²), z)` with `w = x + iy`, and `H = f·σ`.
#[derive(Clone, Copy, Debug)]
pub struct TwinCone {
    pub separation: f64,
}

impl HamiltonianFamily for TwinCone {
    fn dim(&self) -> usize {
        2
    }
    fn n_params(&self) -> usize {
        3
    }
    fn hamiltonian(&self, x: &[f64]) -> CMatrix {
        let w = C64::new(x[0], x[1]);
        let f = w * w - C64::new(self.separation * self.separation, 0.0);
        pauli(0) * C64::new(f.re, 0.0) + pauli(1) * C64::new(f.im, 0.0) + pauli(2) * C64::new(x[2], 0.0)
    }
}

/// Family defined by a closure, with finite-difference derivatives.
pub struct FnFamily<F> {
    dim: usize,
    n_params: usize,
    f: F,
    step: f64,
}

impl<F> FnFamily<F>
where
    F: Fn(&[f64]) -> CMatrix + Send + Sync,
{
    pub fn new(dim: usize, n_params: usize, f: F) -> Self {
        Self { dim, n_params, f, step: FD_STEP }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }
}

impl<F> HamiltonianFamily for FnFamily<F>
where
    F: Fn(&[f64]) -> CMatrix + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn n_params(&self) -> usize {
        self.n_params
    }
    fn hamiltonian(&self, x: &[f64]) -> CMatrix {
        (self.f)(x)
    }
    fn fd_step(&self) -> f64 {
        self.step
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conical_derivative_matches_finite_difference() {
        let fd = FnFamily::new(2, 2, |x: &[f64]| ConicalModel.hamiltonian(x));
        for i in 0..2 {
            let d = fd.derivative(&[0.3, 0.8], i) - ConicalModel.derivative(&[0.3, 0.8], i);
            assert!(d.norm() < 1e-10);
        }
    }

    #[test]
    fn twin_cone_vanishes_at_both_crossings() {
        let t = TwinCone { separation: 0.4 };
        assert!(t.hamiltonian(&[0.4, 0.0, 0.0]).norm() < 1e-15);
        assert!(t.hamiltonian(&[-0.4, 0.0, 0.0]).norm() < 1e-15);
        assert!(t.hamiltonian(&[0.0, 0.0, 0.0]).norm() > 0.1);
    }
}
