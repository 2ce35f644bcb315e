use std::f64::consts::PI;

use rayon::prelude::*;
use spectral_core::{check_isolated, frame_at, inner, CVector, HamiltonianFamily, C64};

use crate::GeometryError;

/// Latitude–longitude mesh: `n_theta` polar bands, `n_phi` azimuthal sectors,
/// triangle fans at both poles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SphereMesh {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for SphereMesh {
    fn default() -> Self {
        Self { n_theta: 64, n_phi: 128 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChargeReport {
    pub charge: i64,
    /// Total outward flux in units of 2π.
    pub flux: f64,
    pub residual: f64,
    pub mesh: SphereMesh,
}

/// Largest allowed distance of the flux from an integer.
pub const CHARGE_RESIDUAL: f64 = 0.05;

pub fn sphere_point(center: &[f64], radius: f64, theta: f64, phi: f64) -> Vec<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    vec![center[0] + radius * st * cp, center[1] + radius * st * sp, center[2] + radius * ct]
}

pub fn monopole_charge<F: HamiltonianFamily + ?Sized>(
    family: &F,
    center: &[f64],
    radius: f64,
    band: usize,
) -> Result<ChargeReport, GeometryError> {
    monopole_charge_on(family, center, radius, band, SphereMesh::default())
}

/// Outward Berry flux of `band` through a sphere, from products of link overlaps
/// around each plaquette. Independent of eigenvector phases.
pub fn monopole_charge_on<F: HamiltonianFamily + ?Sized>(
    family: &F,
    center: &[f64],
    radius: f64,
    band: usize,
    mesh: SphereMesh,
) -> Result<ChargeReport, GeometryError> {
    if family.n_params() != 3 || center.len() != 3 {
        return Err(GeometryError::Invalid("monopole charge needs a three-parameter family".into()));
    }
    if !(radius > 0.0) || mesh.n_theta < 2 || mesh.n_phi < 3 {
        return Err(GeometryError::Invalid("need a positive radius and at least a 2×3 mesh".into()));
    }
    let (nt, np) = (mesh.n_theta, mesh.n_phi);
    let vertex = |theta: f64, phi: f64| -> Result<CVector, GeometryError> {
        let f = frame_at(family, &sphere_point(center, radius, theta, phi))?;
        f.check_band(band)?;
        check_isolated(family, &f, band)?;
        Ok(f.vector(band))
    };
    let north = vertex(0.0, 0.0)?;
    let south = vertex(PI, 0.0)?;
    // rings[i - 1][j] at θ_i = iπ/nt for i = 1..nt−1
    let rings: Vec<Vec<CVector>> = (1..nt)
        .into_par_iter()
        .map(|i| {
            let th = i as f64 * PI / nt as f64;
            (0..np).map(|j| vertex(th, 2.0 * PI * j as f64 / np as f64)).collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let link = |u: &CVector, v: &CVector| inner(u, v);
    let loop_phase = |vs: &[&CVector]| -> f64 {
        let mut z = C64::new(1.0, 0.0);
        for k in 0..vs.len() {
            z *= link(vs[k], vs[(k + 1) % vs.len()]);
        }
        z.arg()
    };
    let mut flux = 0.0;
    for j in 0..np {
        let jn = (j + 1) % np;
        flux += loop_phase(&[&north, &rings[0][j], &rings[0][jn]]);
    }
    for i in 0..nt - 2 {
        let mut row = 0.0;
        for j in 0..np {
            let jn = (j + 1) % np;
            row += loop_phase(&[&rings[i][j], &rings[i + 1][j], &rings[i + 1][jn], &rings[i][jn]]);
        }
        flux += row;
    }
    let last = nt - 2;
    for j in 0..np {
        let jn = (j + 1) % np;
        flux += loop_phase(&[&rings[last][j], &south, &rings[last][jn]]);
    }
    let turns = flux / (2.0 * PI);
    let charge = turns.round();
    let residual = (turns - charge).abs();
    if residual >= CHARGE_RESIDUAL {
        return Err(GeometryError::RefinementNeeded { flux: turns, residual });
    }
    Ok(ChargeReport { charge: charge as i64, flux: turns, residual, mesh })
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::{SpinField, TwinCone};

    #[test]
    fn unit_monopole_charges() {
        let fam = SpinField::default();
        let lo = monopole_charge(&fam, &[0.0; 3], 1.0, 0).unwrap();
        let up = monopole_charge(&fam, &[0.0; 3], 1.0, 1).unwrap();
        assert_eq!((lo.charge, up.charge), (-1, 1));
        assert!(lo.residual < 1e-9);
    }

    #[test]
    fn reversed_field_negates() {
        let fam = SpinField { scale: -1.0 };
        assert_eq!(monopole_charge(&fam, &[0.0; 3], 1.0, 0).unwrap().charge, 1);
    }

    #[test]
    fn empty_sphere_has_no_charge() {
        let fam = SpinField::default();
        let r = monopole_charge(&fam, &[2.0, 0.5, 0.0], 1.0, 0).unwrap();
        assert_eq!(r.charge, 0);
    }

    #[test]
    fn coarse_and_fine_meshes_agree() {
        let fam = SpinField::default();
        let a = monopole_charge_on(&fam, &[0.1, -0.2, 0.05], 0.7, 1, SphereMesh { n_theta: 16, n_phi: 32 }).unwrap();
        let b = monopole_charge(&fam, &[0.1, -0.2, 0.05], 0.7, 1).unwrap();
        assert_eq!(a.charge, b.charge);
    }

    #[test]
    fn twin_crossings_add() {
        let fam = TwinCone { separation: 0.4 };
        let both = monopole_charge(&fam, &[0.0; 3], 1.0, 1).unwrap();
        let one = monopole_charge(&fam, &[0.4, 0.0, 0.0], 0.2, 1).unwrap();
        assert_eq!(one.charge.abs(), 1);
        assert_eq!(both.charge, 2 * one.charge);
    }

    #[test]
    fn two_parameter_family_is_refused() {
        assert!(monopole_charge(&spectral_core::ConicalModel, &[0.0; 3], 1.0, 0).is_err());
    }
}
