use crate::{frame_at, gauge_fix, inner, CMatrix, EigenFrame, HamiltonianFamily, ParameterPath, SpectralError, C64};

/// Relative gap below which a division by `λ_a − λ_b` is refused.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// `⟨b|∂_i a⟩` evaluated two ways.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coupling {
    /// `⟨b|∂_i H|a⟩ / (λ_a − λ_b)`.
    pub value: C64,
    /// Central difference of matched eigenvectors projected on `⟨b|`.
    pub finite_difference: C64,
}

impl Coupling {
    pub fn discrepancy(&self) -> f64 {
        (self.value - self.finite_difference).norm()
    }
}

fn gap_check(frame: &EigenFrame, scale: f64, a: usize, b: usize) -> Result<f64, SpectralError> {
    let gap = frame.values[a] - frame.values[b];
    if gap.abs() <= DEGENERACY_TOL * scale {
        return Err(SpectralError::NearDegenerate { a, b, gap: gap.abs() });
    }
    Ok(gap)
}

/// Non-adiabatic coupling `⟨b,x|∂_i|a,x⟩` for bands indexed in ascending order at `x`.
pub fn nonadiabatic_coupling<F: HamiltonianFamily + ?Sized>(
    family: &F,
    x: &[f64],
    a: usize,
    b: usize,
    dir: usize,
) -> Result<Coupling, SpectralError> {
    if a == b {
        return Err(SpectralError::SameBand { band: a });
    }
    let frame = frame_at(family, x)?;
    frame.check_band(a)?;
    frame.check_band(b)?;
    let scale = family.hamiltonian(x).norm();
    let gap = gap_check(&frame, scale, a, b)?;
    let va = frame.vector(a);
    let vb = frame.vector(b);
    let dh = family.derivative(x, dir);
    let value = inner(&vb, &(&dh * &va)) / C64::new(gap, 0.0);

    let h = family.fd_step();
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    xp[dir] += h;
    xm[dir] -= h;
    let fp = gauge_fix(&frame_at(family, &xp)?, Some(&frame))?;
    let fm = gauge_fix(&frame_at(family, &xm)?, Some(&frame))?;
    let dv = (fp.vector(a) - fm.vector(a)) / C64::new(2.0 * h, 0.0);
    let finite_difference = inner(&vb, &dv);
    Ok(Coupling { value, finite_difference })
}

/// Off-diagonal `[K_i]_ab = ⟨a|∂_i b⟩` in the frame's basis, zero on the diagonal.
pub fn coupling_matrix<F: HamiltonianFamily + ?Sized>(
    family: &F,
    frame: &EigenFrame,
    dir: usize,
) -> Result<CMatrix, SpectralError> {
    let n = frame.dim();
    let scale = family.hamiltonian(&frame.point).norm();
    let dh = family.derivative(&frame.point, dir);
    let m = frame.vectors.adjoint() * dh * &frame.vectors;
    let mut k = CMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            if a != b {
                let gap = gap_check(frame, scale, b, a)?;
                k[(a, b)] = m[(a, b)] / C64::new(gap, 0.0);
            }
        }
    }
    Ok(k)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioReport {
    /// `sup_t max_{b≠a} |⟨b|∂_i a⟩ẋ^i / (λ_b − λ_a)|`; infinite on a crossing.
    pub ratio: f64,
    pub worst_time: f64,
    pub crossing: bool,
}

/// Adiabaticity ratio of band `a` (ascending index at the path start) along the
/// samples of `path`; the band is followed by overlap matching.
pub fn adiabaticity_ratio<F: HamiltonianFamily + ?Sized>(
    family: &F,
    path: &ParameterPath,
    a: usize,
) -> Result<RatioReport, SpectralError> {
    let mut prev: Option<EigenFrame> = None;
    let mut report = RatioReport { ratio: 0.0, worst_time: path.t0(), crossing: false };
    for (k, &t) in path.times().iter().enumerate() {
        let x = &path.points()[k];
        let raw = frame_at(family, x)?;
        raw.check_band(a)?;
        let frame = match &prev {
            None => raw,
            Some(p) => match gauge_fix(&raw, Some(p)) {
                Ok(f) => f,
                Err(SpectralError::AmbiguousMatching { .. }) => {
                    return Ok(RatioReport { ratio: f64::INFINITY, worst_time: t, crossing: true });
                }
                Err(e) => return Err(e),
            },
        };
        let v = path.velocity(t);
        let scale = family.hamiltonian(x).norm();
        let va = frame.vector(a);
        let dh: Vec<CMatrix> = (0..family.n_params()).map(|i| family.derivative(x, i)).collect();
        for b in 0..frame.dim() {
            if b == a {
                continue;
            }
            let gap = frame.values[b] - frame.values[a];
            if gap.abs() <= DEGENERACY_TOL * scale {
                return Ok(RatioReport { ratio: f64::INFINITY, worst_time: t, crossing: true });
            }
            let vb = frame.vector(b);
            let mut c = C64::new(0.0, 0.0);
            for (i, d) in dh.iter().enumerate() {
                c += inner(&vb, &(d * &va)) * C64::new(v[i], 0.0);
            }
            // ⟨b|∂a⟩ = ⟨b|∂H|a⟩/(λ_a − λ_b); one more division by the gap.
            let r = c.norm() / (gap * gap);
            if r > report.ratio {
                report.ratio = r;
                report.worst_time = t;
            }
        }
        prev = Some(frame);
    }
    Ok(report)
}
