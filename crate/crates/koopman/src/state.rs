use spectral_core::{c64, CVector, C64};

use crate::{KoopmanError, LiouvilleOperator, PeriodicGrid};

/// Joint state on `ℋ ⊗ L²(circle)`, stored node-major: entry `j·d + a` is component `a` at node `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct SKState {
    pub dim: usize,
    pub grid: PeriodicGrid,
    pub values: CVector,
}

impl SKState {
    pub fn new(dim: usize, grid: PeriodicGrid, values: CVector) -> Result<Self, KoopmanError> {
        if values.len() != dim * grid.m {
            return Err(KoopmanError::Dimension(format!("{} values for {dim} × {} array", values.len(), grid.m)));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(KoopmanError::Invalid("non-finite state".into()));
        }
        Ok(Self { dim, grid, values })
    }

    /// Samples `profile(θ_j)` at every node.
    pub fn from_profile(dim: usize, grid: PeriodicGrid, profile: impl Fn(f64) -> CVector) -> Result<Self, KoopmanError> {
        let mut values = CVector::zeros(dim * grid.m);
        for (j, theta) in grid.nodes().into_iter().enumerate() {
            let v = profile(theta);
            if v.len() != dim {
                return Err(KoopmanError::Dimension(format!("profile returned {} components, expected {dim}", v.len())));
            }
            values.rows_mut(j * dim, dim).copy_from(&v);
        }
        Self::new(dim, grid, values)
    }

    /// `ψ · exp(κ(cos(θ − θ0) − 1))`: a smooth bump of unit height centred at `θ0`.
    pub fn von_mises(psi: &CVector, grid: PeriodicGrid, center: f64, kappa: f64) -> Result<Self, KoopmanError> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(KoopmanError::Invalid(format!("concentration {kappa} must be positive")));
        }
        Self::from_profile(psi.len(), grid, |t| psi * c64((kappa * ((t - center).cos() - 1.0)).exp(), 0.0))
    }

    pub fn node(&self, j: usize) -> CVector {
        self.values.rows(j * self.dim, self.dim).into_owned()
    }

    pub fn component(&self, a: usize) -> Vec<C64> {
        (0..self.grid.m).map(|j| self.values[j * self.dim + a]).collect()
    }

    /// Norm in the grid measure `2π/m Σ_j ‖Ψ_j‖²`.
    pub fn mu_norm(&self) -> f64 {
        (self.grid.weight() * self.values.norm_squared()).sqrt()
    }

    /// `⟨θ|Ψ⟩` through band-limited interpolation of each component.
    pub fn evaluate(&self, op: &LiouvilleOperator, theta: f64) -> CVector {
        CVector::from_iterator(self.dim, (0..self.dim).map(|a| op.interpolate(&self.component(a), theta)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_and_component_views_agree() {
        let g = PeriodicGrid::new(8).unwrap();
        let s = SKState::from_profile(2, g, |t| CVector::from_vec(vec![c64(t, 0.0), c64(0.0, -t)])).unwrap();
        assert_eq!(s.node(3)[1], s.component(1)[3]);
        assert_eq!(s.node(5)[0], c64(g.node(5), 0.0));
    }

    #[test]
    fn uniform_profile_has_circle_norm() {
        let g = PeriodicGrid::new(10).unwrap();
        let s = SKState::from_profile(1, g, |_| CVector::from_element(1, c64(1.0, 0.0))).unwrap();
        assert!((s.mu_norm() - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bump_peaks_at_its_centre() {
        let g = PeriodicGrid::new(64).unwrap();
        let psi = CVector::from_vec(vec![c64(0.6, 0.0), c64(0.0, 0.8)]);
        let s = SKState::von_mises(&psi, g, g.node(10), 50.0).unwrap();
        assert!((s.node(10) - &psi).norm() < 1e-14);
        assert!(s.node(40).norm() < 1e-30);
    }

    #[test]
    fn wrong_length_is_rejected() {
        let g = PeriodicGrid::new(8).unwrap();
        assert!(matches!(SKState::new(2, g, CVector::zeros(15)), Err(KoopmanError::Dimension(_))));
    }
}
