use spectral_core::{c64, CMatrix, C64};

use crate::connection::{connection_from, Flavor, OperatorConnection};
use crate::mixed::labeled_spectrum;
use crate::{BipartiteFamily, OpenError};

#[derive(Clone, Debug)]
pub struct AdiabaticFields {
    pub point: Vec<f64>,
    pub pairs: Vec<(usize, usize)>,
    /// `∂_i𝔄_j − ∂_j𝔄_i + i[𝔄_i, 𝔄_j]`.
    pub b: Vec<CMatrix>,
    /// `∂_i𝒜_j − ∂_j𝒜_i + i[𝒜_i, 𝒜_j] − ℬ_ij`.
    pub f: Vec<CMatrix>,
    pub mean_b: Vec<C64>,
    pub mean_f: Vec<C64>,
}

fn field(center: &OperatorConnection, plus: &[OperatorConnection], minus: &[OperatorConnection], i: usize, j: usize, step: f64) -> CMatrix {
    let d = |k: usize, l: usize| (&plus[k].components[l] - &minus[k].components[l]) / c64(2.0 * step, 0.0);
    let (ci, cj) = (&center.components[i], &center.components[j]);
    d(i, j) - d(j, i) + (ci * cj - cj * ci) * c64(0.0, 1.0)
}

/// Operator-valued fields of both connections, with curls by central
/// differences of connections held in the section of `ψ(x)`.
pub fn adiabatic_fields<B: BipartiteFamily + ?Sized>(family: &B, a: usize, alpha: usize, x: &[f64]) -> Result<AdiabaticFields, OpenError> {
    let n = family.n_params();
    if n < 2 {
        return Err(OpenError::Invalid("fields need at least two parameters".into()));
    }
    let lab = labeled_spectrum(family, x)?;
    let w = lab.vector(a, alpha);
    let step = 10.0 * family.fd_step();
    let at = |y: &[f64], flavor: Flavor| -> Result<OperatorConnection, OpenError> {
        connection_from(family, &labeled_spectrum(family, y)?, a, alpha, flavor, Some(&w))
    };
    let mut out: Vec<(Flavor, OperatorConnection, Vec<OperatorConnection>, Vec<OperatorConnection>)> = Vec::new();
    for flavor in [Flavor::FrakA, Flavor::CalA] {
        let center = connection_from(family, &lab, a, alpha, flavor, Some(&w))?;
        let mut plus = Vec::with_capacity(n);
        let mut minus = Vec::with_capacity(n);
        for i in 0..n {
            let mut y = x.to_vec();
            y[i] += step;
            plus.push(at(&y, flavor)?);
            y[i] -= 2.0 * step;
            minus.push(at(&y, flavor)?);
        }
        out.push((flavor, center, plus, minus));
    }
    let rho = out[0].1.rho.matrix().clone();
    let mut pairs = Vec::new();
    let (mut b, mut f, mut mean_b, mut mean_f) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
            let bij = field(&out[0].1, &out[0].2, &out[0].3, i, j, step);
            let fij = field(&out[1].1, &out[1].2, &out[1].3, i, j, step) - &bij;
            mean_b.push((&rho * &bij).trace());
            mean_f.push((&rho * &fij).trace());
            b.push(bij);
            f.push(fij);
        }
    }
    Ok(AdiabaticFields { point: x.to_vec(), pairs, b, f, mean_b, mean_f })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::QubitBath;

    #[test]
    fn uncoupled_means_are_real() {
        let fl = adiabatic_fields(&QubitBath::new(0.0), 1, 0, &[0.6, 0.8]).unwrap();
        assert!(fl.mean_b[0].im.abs() < 1e-6 && fl.mean_f[0].im.abs() < 1e-6, "{fl:?}");
    }

    #[test]
    fn coupled_means_grow_like_the_inverse_coupling() {
        let size = |e: f64| adiabatic_fields(&QubitBath::new(e), 1, 0, &[0.6, 0.8]).unwrap().mean_b[0].norm();
        let r = size(0.005) / size(0.01);
        assert!(r > 1.5 && r < 2.5, "{r}");
    }

    #[test]
    fn uncoupled_entropy_field_vanishes() {
        let fl = adiabatic_fields(&QubitBath::new(0.0), 1, 0, &[0.6, 0.8]).unwrap();
        assert!(fl.mean_f[0].norm() < 1e-6, "{:?}", fl.mean_f);
    }
}
