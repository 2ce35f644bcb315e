use crate::{frame_at, gauge_fix, inner, phase_fixed, CMatrix, CVector, EigenFrame, Gauge, HamiltonianFamily, SpectralError, C64};

/// Resolves `LargestComponent` to the fixed component dominant at `frame`,
/// so the same convention is applied at every stencil point.
pub fn pinned_gauge(frame: &EigenFrame, band: usize, gauge: &Gauge) -> Gauge {
    match gauge {
        Gauge::LargestComponent | Gauge::Matched => Gauge::Component(frame.dominant_component(band)),
        g => g.clone(),
    }
}

/// Eigenvector of the band matched to `reference[band]` at `x`, phased by `gauge`.
pub fn matched_vector<F: HamiltonianFamily + ?Sized>(
    family: &F,
    x: &[f64],
    reference: &EigenFrame,
    band: usize,
    gauge: &Gauge,
) -> Result<CVector, SpectralError> {
    let f = gauge_fix(&frame_at(family, x)?, Some(reference))?;
    phase_fixed(&f.vector(band), gauge, band)
}

/// `A_i = −i⟨a|∂_i a⟩` for each direction in `dirs`, by central differences of
/// eigenvectors in a gauge pinned at `x`.
pub fn berry_connection_fd<F: HamiltonianFamily + ?Sized>(
    family: &F,
    x: &[f64],
    band: usize,
    dirs: &[usize],
    gauge: &Gauge,
) -> Result<Vec<f64>, SpectralError> {
    let center = frame_at(family, x)?;
    center.check_band(band)?;
    check_isolated(family, &center, band)?;
    let g = pinned_gauge(&center, band, gauge);
    let v0 = phase_fixed(&center.vector(band), &g, band)?;
    let h = family.fd_step();
    dirs.iter()
        .map(|&i| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] += h;
            xm[i] -= h;
            let vp = matched_vector(family, &xp, &center, band, &g)?;
            let vm = matched_vector(family, &xm, &center, band, &g)?;
            let dv = (vp - vm) / C64::new(2.0 * h, 0.0);
            Ok((C64::new(0.0, -1.0) * inner(&v0, &dv)).re)
        })
        .collect()
}

/// Errors when `band` is degenerate with a neighbour at `frame`.
pub fn check_isolated<F: HamiltonianFamily + ?Sized>(family: &F, frame: &EigenFrame, band: usize) -> Result<(), SpectralError> {
    let scale = family.hamiltonian(&frame.point).norm();
    for b in 0..frame.dim() {
        if b != band {
            let gap = (frame.values[b] - frame.values[band]).abs();
            if gap <= crate::coupling::DEGENERACY_TOL * scale {
                return Err(SpectralError::NearDegenerate { a: band, b, gap });
            }
        }
    }
    Ok(())
}

/// Frames at successive points with band identity carried by overlap matching.
/// With `gauge` set, matched columns are then re-phased by that convention.
pub fn track_frames<F: HamiltonianFamily + ?Sized>(
    family: &F,
    points: &[Vec<f64>],
    gauge: Option<&Gauge>,
) -> Result<Vec<EigenFrame>, SpectralError> {
    let mut out: Vec<EigenFrame> = Vec::with_capacity(points.len());
    for x in points {
        let raw = frame_at(family, x)?;
        let mut f = match out.last() {
            None => raw,
            Some(prev) => gauge_fix(&raw, Some(prev))?,
        };
        if let Some(g) = gauge {
            let tag = f.gauge.clone();
            f = f.with_gauge(g)?;
            if matches!(g, Gauge::Matched) {
                f.gauge = tag;
            }
        }
        out.push(f);
    }
    Ok(out)
}

/// `Σ_{b ∈ bands} |b⟩⟨b|`.
pub fn projector(frame: &EigenFrame, bands: &[usize]) -> CMatrix {
    let n = frame.dim();
    let mut p = CMatrix::zeros(n, n);
    for &b in bands {
        let v = frame.vector(b);
        p += &v * v.adjoint();
    }
    p
}
