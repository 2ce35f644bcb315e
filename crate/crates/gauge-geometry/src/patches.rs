use std::f64::consts::PI;
use std::sync::Arc;

use spectral_core::{frame_at, inner, CVector, HamiltonianFamily, SpectralError, C64};

use crate::sphere::sphere_point;
use crate::GeometryError;

type Twist = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Spherical cap with its own section gauge: `⟨reference, v⟩` real positive,
/// then multiplied by `e^{iζ(x)}` when a twist is set.
#[derive(Clone)]
pub struct Cap {
    pub axis: [f64; 3],
    pub half_angle: f64,
    pub reference: CVector,
    pub twist: Option<Twist>,
}

impl std::fmt::Debug for Cap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cap")
            .field("axis", &self.axis)
            .field("half_angle", &self.half_angle)
            .field("twisted", &self.twist.is_some())
            .finish()
    }
}

impl Cap {
    pub fn with_twist(mut self, twist: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.twist = Some(Arc::new(twist));
        self
    }

    fn section(&self, v: &CVector, x: &[f64], band: usize) -> Result<CVector, GeometryError> {
        let o = inner(&self.reference, v);
        if o.norm() < 1e-8 {
            return Err(SpectralError::GaugeUndefined { band, overlap: o.norm() }.into());
        }
        let zeta = self.twist.as_ref().map_or(0.0, |t| t(x));
        Ok(v * C64::from_polar(1.0, zeta - o.arg()))
    }
}

/// Caps on one sphere in parameter space.
#[derive(Clone, Debug)]
pub struct PatchCover {
    pub center: [f64; 3],
    pub radius: f64,
    pub band: usize,
    pub caps: Vec<Cap>,
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn polar(axis: [f64; 3]) -> (f64, f64) {
    (axis[2].clamp(-1.0, 1.0).acos(), axis[1].atan2(axis[0]))
}

impl PatchCover {
    /// Each cap's reference is the band's eigenvector at the cap centre.
    pub fn new<F: HamiltonianFamily + ?Sized>(
        family: &F,
        center: [f64; 3],
        radius: f64,
        band: usize,
        caps: &[([f64; 3], f64)],
    ) -> Result<Self, GeometryError> {
        if family.n_params() != 3 {
            return Err(GeometryError::Invalid("patch covers live on spheres in a three-parameter space".into()));
        }
        let caps = caps
            .iter()
            .map(|&(axis, half_angle)| {
                let axis = unit(axis);
                let (th, ph) = polar(axis);
                let f = frame_at(family, &sphere_point(&center, radius, th, ph))?;
                f.check_band(band)?;
                Ok(Cap { axis, half_angle, reference: f.vector(band), twist: None })
            })
            .collect::<Result<Vec<_>, GeometryError>>()?;
        Ok(Self { center, radius, band, caps })
    }

    /// Three 100° caps centred on the equator at azimuths 0°, 120°, 240°.
    /// Their triple overlap is a neighbourhood of each pole.
    pub fn three_caps<F: HamiltonianFamily + ?Sized>(family: &F, center: [f64; 3], radius: f64, band: usize) -> Result<Self, GeometryError> {
        let half = 100f64.to_radians();
        let caps: Vec<([f64; 3], f64)> = (0..3)
            .map(|k| {
                let az = 2.0 * PI * k as f64 / 3.0;
                ([az.cos(), az.sin(), 0.0], half)
            })
            .collect();
        Self::new(family, center, radius, band, &caps)
    }

    /// North and south 100° caps overlapping in a band around the equator.
    pub fn hemispheres<F: HamiltonianFamily + ?Sized>(family: &F, center: [f64; 3], radius: f64, band: usize) -> Result<Self, GeometryError> {
        let half = 100f64.to_radians();
        Self::new(family, center, radius, band, &[([0.0, 0.0, 1.0], half), ([0.0, 0.0, -1.0], half)])
    }

    pub fn contains(&self, cap: usize, x: &[f64]) -> bool {
        let d: Vec<f64> = (0..3).map(|k| x[k] - self.center[k]).collect();
        let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        if r == 0.0 {
            return false;
        }
        let a = &self.caps[cap].axis;
        let cos = (d[0] * a[0] + d[1] * a[1] + d[2] * a[2]) / r;
        cos.clamp(-1.0, 1.0).acos() < self.caps[cap].half_angle
    }

    pub fn point(&self, theta: f64, phi: f64) -> Vec<f64> {
        sphere_point(&self.center, self.radius, theta, phi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Normalization {
    /// `χ = 0` at the first sample.
    ZeroAtFirst,
    /// First sample keeps its principal value in `(−π, π]`.
    PrincipalBranch,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub points: Vec<Vec<f64>>,
    pub chi: Vec<f64>,
}

/// Largest phase step accepted between neighbouring overlap samples.
pub const UNWRAP_LIMIT: f64 = PI / 2.0;

fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// `χ^{ab}` with `A^b − A^a = ∇χ^{ab}` on the overlap, unwrapped along `points`.
pub fn transition_function<F: HamiltonianFamily + ?Sized>(
    family: &F,
    cover: &PatchCover,
    a: usize,
    b: usize,
    points: &[Vec<f64>],
    normalization: Normalization,
) -> Result<Transition, GeometryError> {
    if a >= cover.caps.len() || b >= cover.caps.len() {
        return Err(GeometryError::Invalid(format!("cover has {} caps", cover.caps.len())));
    }
    if points.is_empty() {
        return Err(GeometryError::Invalid("no overlap samples".into()));
    }
    let mut chi = Vec::with_capacity(points.len());
    for (k, x) in points.iter().enumerate() {
        if !(cover.contains(a, x) && cover.contains(b, x)) {
            return Err(GeometryError::Invalid(format!("sample {k} lies outside the overlap of caps {a} and {b}")));
        }
        let v = frame_at(family, x)?.vector(cover.band);
        let va = cover.caps[a].section(&v, x, cover.band)?;
        let vb = cover.caps[b].section(&v, x, cover.band)?;
        let raw = inner(&va, &vb).arg();
        match chi.last() {
            None => chi.push(raw),
            Some(&prev) => {
                let step = wrap(raw - prev);
                if step.abs() > UNWRAP_LIMIT {
                    return Err(GeometryError::Unwrap { index: k - 1, jump: step });
                }
                chi.push(prev + step);
            }
        }
    }
    if normalization == Normalization::ZeroAtFirst {
        let c0 = chi[0];
        chi.iter_mut().for_each(|c| *c -= c0);
    }
    Ok(Transition { points: points.to_vec(), chi })
}

/// Net change of `χ` in units of 2π.
pub fn winding(chi: &[f64]) -> f64 {
    match (chi.first(), chi.last()) {
        (Some(a), Some(b)) => (b - a) / (2.0 * PI),
        _ => 0.0,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CocycleReport {
    pub integer: i64,
    pub residual: f64,
}

/// Largest allowed distance of the cocycle from an integer.
pub const COCYCLE_RESIDUAL: f64 = 0.05;

/// `(χ^{ab} + χ^{bc} − χ^{ac}) / 2π` on a connected common point set.
pub fn cocycle_integer(ab: &[f64], bc: &[f64], ac: &[f64]) -> Result<CocycleReport, GeometryError> {
    if ab.is_empty() || ab.len() != bc.len() || ab.len() != ac.len() {
        return Err(GeometryError::Invalid("cocycle needs three equal, non-empty sample sets".into()));
    }
    let mut integer = None;
    let mut residual: f64 = 0.0;
    for k in 0..ab.len() {
        let z = (ab[k] + bc[k] - ac[k]) / (2.0 * PI);
        let n = z.round();
        residual = residual.max((z - n).abs());
        match integer {
            None => integer = Some(n as i64),
            Some(m) if m != n as i64 => {
                return Err(GeometryError::Invalid(format!("cocycle changes from {m} to {n} inside the common set")))
            }
            _ => {}
        }
    }
    if residual >= COCYCLE_RESIDUAL {
        return Err(GeometryError::RefinementNeeded { flux: residual, residual });
    }
    Ok(CocycleReport { integer: integer.expect("non-empty"), residual })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverCharge {
    pub north: CocycleReport,
    pub south: CocycleReport,
    pub charge: i64,
}

/// Charge from the gluing data of a three-cap cover whose triple overlap is
/// one neighbourhood of each pole. Each transition function is carried
/// continuously through its pair overlap along the meridian midway between the
/// two cap axes, starting from its principal value at the north pole.
pub fn cover_charge<F: HamiltonianFamily + ?Sized>(family: &F, cover: &PatchCover, samples: usize) -> Result<CoverCharge, GeometryError> {
    if cover.caps.len() != 3 {
        return Err(GeometryError::Invalid("cover charge needs exactly three caps".into()));
    }
    if samples < 3 {
        return Err(GeometryError::Invalid("need at least three samples per meridian".into()));
    }
    let strip = |a: usize, b: usize| -> Result<Vec<f64>, GeometryError> {
        let (ea, eb) = (cover.caps[a].axis, cover.caps[b].axis);
        let phi = (ea[1] + eb[1]).atan2(ea[0] + eb[0]);
        let pts: Vec<Vec<f64>> = (0..samples).map(|k| cover.point(PI * k as f64 / (samples - 1) as f64, phi)).collect();
        Ok(transition_function(family, cover, a, b, &pts, Normalization::PrincipalBranch)?.chi)
    };
    let (ab, bc, ac) = (strip(0, 1)?, strip(1, 2)?, strip(0, 2)?);
    let n = samples - 1;
    let north = cocycle_integer(&ab[..1], &bc[..1], &ac[..1])?;
    let south = cocycle_integer(&ab[n..], &bc[n..], &ac[n..])?;
    Ok(CoverCharge { charge: south.integer - north.integer, north, south })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monopole_charge;
    use spectral_core::{SpinField, TwinCone};

    fn equator(cover: &PatchCover, n: usize) -> Vec<Vec<f64>> {
        (0..=n).map(|k| cover.point(PI / 2.0, 2.0 * PI * k as f64 / n as f64)).collect()
    }

    #[test]
    fn identical_gauges_give_a_constant() {
        let fam = SpinField::default();
        let cover = PatchCover::hemispheres(&fam, [0.0; 3], 1.0, 0).unwrap();
        let pts = equator(&cover, 200);
        let t = transition_function(&fam, &cover, 0, 0, &pts, Normalization::ZeroAtFirst).unwrap();
        assert!(t.chi.iter().all(|c| c.abs() < 1e-12));
    }

    #[test]
    fn equator_winding_counts_the_charge() {
        let fam = SpinField::default();
        for band in [0, 1] {
            let cover = PatchCover::hemispheres(&fam, [0.0; 3], 1.0, band).unwrap();
            let t = transition_function(&fam, &cover, 1, 0, &equator(&cover, 400), Normalization::ZeroAtFirst).unwrap();
            let q = monopole_charge(&fam, &[0.0; 3], 1.0, band).unwrap().charge;
            assert!((winding(&t.chi) - q as f64).abs() < 1e-9, "band {band}: {}", winding(&t.chi));
        }
    }

    #[test]
    fn twisting_a_patch_shifts_chi() {
        let fam = SpinField::default();
        let mut cover = PatchCover::hemispheres(&fam, [0.0; 3], 1.0, 0).unwrap();
        let pts = equator(&cover, 100);
        let before = transition_function(&fam, &cover, 0, 1, &pts, Normalization::PrincipalBranch).unwrap();
        let zeta = |x: &[f64]| 0.3 * x[0] - 0.2 * x[1] * x[1];
        cover.caps[0] = cover.caps[0].clone().with_twist(zeta);
        let after = transition_function(&fam, &cover, 0, 1, &pts, Normalization::PrincipalBranch).unwrap();
        for ((x, b), a) in pts.iter().zip(&before.chi).zip(&after.chi) {
            let d = wrap(a - b + zeta(x));
            assert!(d.abs() < 1e-12);
        }
    }

    #[test]
    fn three_cap_cocycle_matches_the_flux() {
        let fam = SpinField::default();
        for band in [0, 1] {
            let cover = PatchCover::three_caps(&fam, [0.0; 3], 1.0, band).unwrap();
            let c = cover_charge(&fam, &cover, 201).unwrap();
            assert_eq!(c.charge, monopole_charge(&fam, &[0.0; 3], 1.0, band).unwrap().charge, "{c:?}");
        }
        let rev = SpinField { scale: -1.0 };
        let cover = PatchCover::three_caps(&rev, [0.0; 3], 1.0, 0).unwrap();
        assert_eq!(cover_charge(&rev, &cover, 201).unwrap().charge, 1);
    }

    #[test]
    fn trivial_and_double_bundles() {
        let fam = SpinField::default();
        let cover = PatchCover::three_caps(&fam, [3.0, 0.0, 0.5], 1.0, 0).unwrap();
        assert_eq!(cover_charge(&fam, &cover, 201).unwrap().charge, 0);
        let twin = TwinCone { separation: 0.4 };
        let cover = PatchCover::three_caps(&twin, [0.0; 3], 1.0, 1).unwrap();
        assert_eq!(cover_charge(&twin, &cover, 801).unwrap().charge, monopole_charge(&twin, &[0.0; 3], 1.0, 1).unwrap().charge);
    }

    #[test]
    fn constant_twists_leave_the_cocycle() {
        let fam = SpinField::default();
        let mut cover = PatchCover::three_caps(&fam, [0.0; 3], 1.0, 0).unwrap();
        let base = cover_charge(&fam, &cover, 201).unwrap();
        for (k, z) in [0.4, -1.1, 2.5].into_iter().enumerate() {
            cover.caps[k] = cover.caps[k].clone().with_twist(move |_| z);
        }
        let shifted = cover_charge(&fam, &cover, 201).unwrap();
        assert_eq!(base.charge, shifted.charge);
    }

    #[test]
    fn coarse_overlap_mesh_is_refused() {
        let fam = SpinField::default();
        let cover = PatchCover::hemispheres(&fam, [0.0; 3], 1.0, 0).unwrap();
        let r = transition_function(&fam, &cover, 0, 1, &equator(&cover, 3), Normalization::ZeroAtFirst);
        assert!(matches!(r, Err(GeometryError::Unwrap { .. })));
    }

    #[test]
    fn samples_outside_the_overlap_are_refused() {
        let fam = SpinField::default();
        let cover = PatchCover::hemispheres(&fam, [0.0; 3], 1.0, 0).unwrap();
        let r = transition_function(&fam, &cover, 0, 1, &[cover.point(0.1, 0.0)], Normalization::ZeroAtFirst);
        assert!(r.is_err());
    }
}
