use rayon::prelude::*;
use spectral_core::{c64, C64};

use crate::wormhole::{throat_height, SheetPair, Wormhole};
use crate::FuzzyError;

/// One point of the double-sheet scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub alpha: C64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub p_up_plus: f64,
    pub p_up_minus: f64,
    pub re_z_plus: f64,
    pub re_z_minus: f64,
    /// `⟨σ⟩` of the `+` state.
    pub spin: [f64; 3],
    /// `min |Sp(D^±)|` of the separate sheets.
    pub single_plus: f64,
    pub single_minus: f64,
    /// `|⟨0+| C |0−⟩|` for the sheet coupling `C`.
    pub coupling: f64,
    pub degenerate: bool,
}

impl ScanRow {
    pub const HEADER: [&'static str; 12] =
        ["re_alpha", "im_alpha", "abs_alpha", "lambda0_plus", "lambda0_minus", "p_up_plus", "p_up_minus", "reZ_plus", "reZ_minus", "sx", "sy", "sz"];

    /// Upper-sheet probability of the state with the positive eigenvalue.
    pub fn p_up_positive(&self) -> f64 {
        if self.lambda_plus >= 0.0 {
            self.p_up_plus
        } else {
            self.p_up_minus
        }
    }

    /// Values in the order of [`ScanRow::HEADER`].
    pub fn values(&self) -> [f64; 12] {
        [
            self.alpha.re,
            self.alpha.im,
            self.alpha.norm(),
            self.lambda_plus,
            self.lambda_minus,
            self.p_up_plus,
            self.p_up_minus,
            self.re_z_plus,
            self.re_z_minus,
            self.spin[0],
            self.spin[1],
            self.spin[2],
        ]
    }
}

pub fn scan_row(wormhole: &Wormhole, alpha: C64) -> Result<ScanRow, FuzzyError> {
    let SheetPair { plus, minus, degenerate, coupling, .. } = wormhole.solve(alpha)?;
    let (single_plus, single_minus) = wormhole.single_sheet_minima(alpha)?;
    Ok(ScanRow {
        alpha,
        lambda_plus: plus.lambda,
        lambda_minus: minus.lambda,
        p_up_plus: plus.p_up,
        p_up_minus: minus.p_up,
        re_z_plus: plus.re_z,
        re_z_minus: minus.re_z,
        spin: plus.spin,
        single_plus,
        single_minus,
        coupling,
        degenerate,
    })
}

/// Scan along the ray `α = r e^{iφ}`; failures are kept per point and the scan continues.
pub fn radial_scan(wormhole: &Wormhole, radii: &[f64], phase: f64) -> Vec<Result<ScanRow, FuzzyError>> {
    radii.par_iter().map(|&r| scan_row(wormhole, C64::from_polar(r, phase))).collect()
}

/// Evenly spaced radii `0, …, r_max`.
pub fn radii(r_max: f64, points: usize) -> Vec<f64> {
    (0..points).map(|k| r_max * k as f64 / (points - 1).max(1) as f64).collect()
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the minimum of `|p_up_positive − 1/2|` in `[lo, hi]`,
/// stopped once the bracket is narrower than `tol`.
pub fn refine_crossing(wormhole: &Wormhole, lo: f64, hi: f64, phase: f64, tol: f64) -> Result<f64, FuzzyError> {
    let f = |r: f64| -> Result<f64, FuzzyError> { Ok((scan_row(wormhole, C64::from_polar(r, phase))?.p_up_positive() - 0.5).abs()) };
    let (mut a, mut b) = (lo, hi);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Brackets `[r_k, r_{k+1}]` where the positive-branch sheet probability crosses 1/2.
/// Degenerate rows are skipped.
pub fn crossing_brackets(rows: &[ScanRow]) -> Vec<(f64, f64)> {
    let usable: Vec<&ScanRow> = rows.iter().filter(|r| !r.degenerate).collect();
    usable
        .windows(2)
        .filter(|w| (w[0].p_up_positive() - 0.5) * (w[1].p_up_positive() - 0.5) < 0.0)
        .map(|w| (w[0].alpha.norm(), w[1].alpha.norm()))
        .collect()
}

/// Largest change of every reported scalar between two scans of the same radii.
pub fn truncation_change(a: &[ScanRow], b: &[ScanRow]) -> f64 {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.degenerate && !y.degenerate)
        .map(|(x, y)| {
            let (u, v) = (x.values(), y.values());
            let mut worst = u.iter().zip(&v).skip(3).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            worst = worst.max((x.coupling - y.coupling).abs());
            worst
        })
        .fold(0.0, f64::max)
}

/// Quantitative properties of the double-sheet profile.
#[derive(Clone, Debug)]
pub struct Fig3Report {
    pub rows: Vec<ScanRow>,
    pub failures: Vec<(f64, String)>,
    /// Largest `|λ₀₊ + λ₀₋|`.
    pub symmetry: f64,
    pub brackets: Vec<(f64, f64)>,
    pub crossing: Option<f64>,
    /// `p_up` of the `+` state at the refined crossing.
    pub crossing_probability: Option<f64>,
    /// `p_up` of the `+` state at `|α| = 1`.
    pub throat_probability: f64,
    /// Positive-branch sheet probability is monotone across `crossing ± 0.05`.
    pub monotone_near_crossing: bool,
    /// Largest relative miss of `⟨Re Z⟩±` against `±z(r)` for `r ≥ 1.5`, and where.
    pub profile_error: (f64, f64),
    /// `|⟨0+|C|0−⟩|` at the outermost radius.
    pub far_coupling: f64,
    /// Largest change of any reported value between `N` and `3N/2`.
    pub truncation_change: f64,
}

/// Scans `|α| ∈ [0, r_max]` on the real axis at truncation `n` and at `3n/2`.
pub fn fig3_report(n: usize, r_max: f64, points: usize) -> Result<Fig3Report, FuzzyError> {
    let w = Wormhole::new(n)?;
    let big = Wormhole::new(n * 3 / 2)?;
    let rs = radii(r_max, points);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (r, res) in rs.iter().zip(radial_scan(&w, &rs, 0.0)) {
        match res {
            Ok(row) => rows.push(row),
            Err(e) => failures.push((*r, e.to_string())),
        }
    }
    let kept: Vec<f64> = rows.iter().map(|r| r.alpha.norm()).collect();
    let check: Vec<ScanRow> = radial_scan(&big, &kept, 0.0).into_iter().collect::<Result<_, _>>()?;
    let symmetry = rows.iter().map(|r| (r.lambda_plus + r.lambda_minus).abs()).fold(0.0, f64::max);
    let brackets = crossing_brackets(&rows);
    let (mut crossing, mut crossing_probability, mut monotone_near_crossing) = (None, None, false);
    if let Some(&(lo, hi)) = brackets.first() {
        let c = refine_crossing(&w, lo, hi, 0.0, 1e-4)?;
        crossing = Some(c);
        crossing_probability = Some(scan_row(&w, c64(c, 0.0))?.p_up_plus);
        let local: Vec<f64> = (0..=20)
            .map(|k| scan_row(&w, c64(c - 0.05 + 0.005 * k as f64, 0.0)).map(|r| r.p_up_positive()))
            .collect::<Result<_, _>>()?;
        let up = local.windows(2).all(|p| p[1] >= p[0]);
        let down = local.windows(2).all(|p| p[1] <= p[0]);
        monotone_near_crossing = up || down;
    }
    let throat_probability = scan_row(&w, c64(1.0, 0.0))?.p_up_plus;
    let mut profile_error = (0.0, f64::NAN);
    for r in rows.iter().filter(|r| r.alpha.norm() >= 1.5) {
        let z = throat_height(r.alpha).re;
        let e = ((r.re_z_plus - z).abs().max((r.re_z_minus + z).abs())) / z;
        if e > profile_error.0 {
            profile_error = (e, r.alpha.norm());
        }
    }
    let far_coupling = rows.last().map(|r| r.coupling).unwrap_or(f64::NAN);
    let truncation_change = truncation_change(&rows, &check);
    Ok(Fig3Report {
        rows,
        failures,
        symmetry,
        brackets,
        crossing,
        crossing_probability,
        throat_probability,
        monotone_near_crossing,
        profile_error,
        far_coupling,
        truncation_change,
    })
}
