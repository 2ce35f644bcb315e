use spectral_core::{berry_connection_fd, c64, eigendecompose, CMatrix, CVector, Gauge, HermitianOperator, C64};

use crate::density::{partial_trace_matrix, DensityMatrix, Keep};
use crate::mixed::{labeled_spectrum, reduced, Labeling};
use crate::{BipartiteFamily, OpenError, Total};

/// Eigenvalues of `ρ` at or below this are outside its support.
pub const SUPPORT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// Projected on the environment sector: `𝒜ρ = −i tr_E(P_α |∂ψ⟩⟨ψ|)`.
    CalA,
    /// Unprojected: `−i∇ρ = 𝔄ρ − ρ𝔄†`.
    FrakA,
}

#[derive(Clone, Debug)]
pub struct OperatorConnection {
    pub point: Vec<f64>,
    pub flavor: Flavor,
    pub components: Vec<CMatrix>,
    /// Defining-relation residual per direction.
    pub residuals: Vec<f64>,
    /// Scalar connection of the bipartite eigenvector in the same section.
    pub scalar: Vec<f64>,
    pub rho: DensityMatrix,
    pub rank: usize,
    /// `ρ` was singular and the pseudo-solution on its support was used.
    pub rank_deficient: bool,
}

impl OperatorConnection {
    /// `tr(ρ X_i)` per direction.
    pub fn averages(&self) -> Vec<C64> {
        self.components.iter().map(|c| (self.rho.matrix() * c).trace()).collect()
    }

    pub fn contracted(&self, velocity: &[f64]) -> CMatrix {
        let d = self.rho.dim();
        self.components.iter().zip(velocity).fold(CMatrix::zeros(d, d), |acc, (c, v)| acc + c * c64(*v, 0.0))
    }
}

/// `v` rephased so that `⟨w, v⟩` is real positive.
pub(crate) fn section(v: &CVector, w: &CVector) -> Result<CVector, OpenError> {
    let o = w.dotc(v);
    if o.norm() < 1e-8 {
        return Err(spectral_core::SpectralError::GaugeUndefined { band: 0, overlap: o.norm() }.into());
    }
    Ok(v * C64::from_polar(1.0, -o.arg()))
}

pub(crate) fn pseudo_inverse(m: &CMatrix) -> Result<(CMatrix, usize), OpenError> {
    let f = eigendecompose(&HermitianOperator::symmetrized(m.clone())?)?;
    let n = m.nrows();
    let mut inv = CMatrix::zeros(n, n);
    let mut rank = 0;
    for (k, &l) in f.values.iter().enumerate() {
        if l > SUPPORT_TOL {
            let u = f.vector(k);
            inv += (&u * u.adjoint()) * c64(1.0 / l, 0.0);
            rank += 1;
        }
    }
    Ok((inv, rank))
}

/// Connection with the bipartite eigenvector in its own section at `x`.
pub fn operator_connection<B: BipartiteFamily + ?Sized>(
    family: &B,
    a: usize,
    alpha: usize,
    x: &[f64],
    flavor: Flavor,
) -> Result<OperatorConnection, OpenError> {
    operator_connection_in(family, a, alpha, x, flavor, None)
}

/// Connection in the section `⟨reference, ψ⟩ > 0`, or `ψ(x)`'s own when absent.
pub fn operator_connection_in<B: BipartiteFamily + ?Sized>(
    family: &B,
    a: usize,
    alpha: usize,
    x: &[f64],
    flavor: Flavor,
    reference: Option<&CVector>,
) -> Result<OperatorConnection, OpenError> {
    let lab = labeled_spectrum(family, x)?;
    connection_from(family, &lab, a, alpha, flavor, reference)
}

pub(crate) fn connection_from<B: BipartiteFamily + ?Sized>(
    family: &B,
    lab: &Labeling,
    a: usize,
    alpha: usize,
    flavor: Flavor,
    reference: Option<&CVector>,
) -> Result<OperatorConnection, OpenError> {
    let dims = family.dims();
    let (ds, _) = dims;
    if a >= ds || alpha >= dims.1 {
        return Err(OpenError::Invalid(format!("label ({a}, {alpha}) outside {}⊗{}", dims.0, dims.1)));
    }
    let x = &lab.point;
    let raw = lab.vector(a, alpha);
    let w = reference.cloned().unwrap_or_else(|| raw.clone());
    let psi = section(&raw, &w)?;
    let rho_m = reduced(&psi, dims)?;
    let rho = DensityMatrix::new(rho_m.clone())?;
    let (inv, rank) = pseudo_inverse(&rho_m)?;
    let proj = (0..ds).fold(CMatrix::zeros(psi.len(), psi.len()), |acc, b| {
        let v = lab.vector(b, alpha);
        acc + &v * v.adjoint()
    });
    let h = family.fd_step();
    let n = family.n_params();
    let mut components = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for i in 0..n {
        let at = |s: f64| -> Result<CVector, OpenError> {
            let mut y = x.clone();
            y[i] += s;
            section(&labeled_spectrum(family, &y)?.vector(a, alpha), &w)
        };
        let (pp, pm) = (at(h)?, at(-h)?);
        let dpsi = (&pp - &pm) / c64(2.0 * h, 0.0);
        let outer = &dpsi * psi.adjoint();
        let minus_i = c64(0.0, -1.0);
        match flavor {
            Flavor::CalA => {
                let r = partial_trace_matrix(&(&proj * &outer), dims, Keep::System)? * minus_i;
                let c = &r * &inv;
                residuals.push((&c * &rho_m - &r).norm());
                components.push(c);
            }
            Flavor::FrakA => {
                let r = partial_trace_matrix(&outer, dims, Keep::System)? * minus_i;
                let c = &r * &inv;
                let drho = (reduced(&pp, dims)? - reduced(&pm, dims)?) / c64(2.0 * h, 0.0);
                let rhs = &c * &rho_m - &rho_m * c.adjoint();
                residuals.push((drho * minus_i - rhs).norm());
                components.push(c);
            }
        }
    }
    let dirs: Vec<usize> = (0..n).collect();
    let scalar = berry_connection_fd(&Total(family), x, lab.index[a][alpha], &dirs, &Gauge::Section(w))?;
    Ok(OperatorConnection { point: x.clone(), flavor, components, residuals, scalar, rho, rank, rank_deficient: rank < ds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::QubitBath;

    #[test]
    fn averages_reproduce_the_scalar_connection() {
        let m = QubitBath::new(0.01);
        for flavor in [Flavor::CalA, Flavor::FrakA] {
            let c = operator_connection(&m, 1, 0, &[0.6, 0.8], flavor).unwrap();
            for (avg, a) in c.averages().iter().zip(&c.scalar) {
                assert!((avg.re - a).abs() < 1e-8 && avg.im.abs() < 1e-8, "{flavor:?}: {avg} vs {a}");
            }
            assert!(c.residuals.iter().all(|r| *r < 1e-8), "{flavor:?}: {:?}", c.residuals);
            assert!(!c.rank_deficient);
        }
    }

    #[test]
    fn uncoupled_limit_is_scalar_on_the_support() {
        let m = QubitBath::new(0.0);
        let x = [0.6, 0.8];
        let lab = labeled_spectrum(&m, &x).unwrap();
        let v = lab.system.vector(1);
        let pr = &v * v.adjoint();
        for flavor in [Flavor::CalA, Flavor::FrakA] {
            let c = operator_connection(&m, 1, 0, &x, flavor).unwrap();
            assert_eq!(c.rank, 1);
            assert!(c.rank_deficient);
            for (k, a) in c.components.iter().zip(&c.scalar) {
                // On the support the component acts as A times the identity.
                let on = &pr * k * &pr;
                assert!((on - &pr * c64(*a, 0.0)).norm() < 1e-8, "{flavor:?}");
            }
        }
    }

    #[test]
    fn flavors_agree_on_the_state_to_first_order() {
        let x = [0.6, 0.8];
        let v = [-0.8, 0.6];
        let gap = |e: f64| {
            let m = QubitBath::new(e);
            let c = operator_connection(&m, 1, 0, &x, Flavor::CalA).unwrap();
            let f = operator_connection(&m, 1, 0, &x, Flavor::FrakA).unwrap();
            let rho = c.rho.matrix();
            ((c.contracted(&v) - f.contracted(&v)) * rho).norm()
        };
        let (g1, g2) = (gap(0.01), gap(0.005));
        assert!(g1 < 0.05 && (g1 / g2 - 2.0).abs() < 0.3, "{g1} {g2}");
    }

    #[test]
    fn components_grow_off_the_dominant_direction() {
        // The small eigenvalues of ρ are O(ε²) while the matching columns of the
        // right-hand side are O(ε), so the solved operators scale like 1/ε.
        let x = [0.6, 0.8];
        let size = |e: f64| operator_connection(&QubitBath::new(e), 1, 0, &x, Flavor::FrakA).unwrap().components[0].norm();
        let r = size(0.005) / size(0.01);
        assert!((r - 2.0).abs() < 0.3, "{r}");
    }
}
