use spectral_core::{c64, CVector, C64};

use crate::quasi::minimal_modulus;
use crate::wormhole::Wormhole;
use crate::FuzzyError;

/// Generator used for the single-sheet evolution `i dψ/ds = G ψ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    /// Hermitian part plus `i Im Z`.
    Dissipative,
    HermitianOnly,
}

/// Largest tolerated deviation of `ln‖ψ‖` from the fitted line.
pub const FIT_TOL: f64 = 1e-2;

#[derive(Clone, Debug)]
pub struct DecayFit {
    /// Fitted `κ` in `‖ψ(s)‖ ≈ e^{−κs}`, per Planck time.
    pub rate: f64,
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    /// Largest deviation of `ln‖ψ‖` from the fitted line.
    pub residual: f64,
}

/// Evolves the quasi-coherent state of the Hermitian single-sheet operator at `α`
/// for `duration` Planck times and fits the exponential decay of its norm.
pub fn single_sheet_decay(wormhole: &Wormhole, alpha: C64, duration: f64, samples: usize, generator: Generator) -> Result<DecayFit, FuzzyError> {
    if !(duration > 0.0) || samples < 3 {
        return Err(FuzzyError::Invalid("decay needs a positive duration and at least 3 samples".into()));
    }
    let h = wormhole.single_sheet(alpha).hermitian;
    let psi0: CVector = minimal_modulus(&h, 1)?.remove(0).vector;
    let g = match generator {
        Generator::Dissipative => &h + wormhole.dissipator(),
        Generator::HermitianOnly => h,
    };
    let dt = duration / (samples - 1) as f64;
    let step = (g * c64(0.0, -dt)).exp();
    let mut psi = psi0;
    let mut times = Vec::with_capacity(samples);
    let mut norms = Vec::with_capacity(samples);
    for k in 0..samples {
        if k > 0 {
            psi = &step * &psi;
        }
        times.push(k as f64 * dt);
        norms.push(psi.norm());
    }
    let logs: Vec<f64> = norms.iter().map(|n| n.ln()).collect();
    let (slope, intercept) = line_fit(&times, &logs);
    let residual = times
        .iter()
        .zip(&logs)
        .map(|(t, l)| (l - (intercept + slope * t)).abs())
        .fold(0.0, f64::max);
    if residual > FIT_TOL {
        return Err(FuzzyError::FitResidual { residual });
    }
    Ok(DecayFit { rate: -slope, times, norms, residual })
}

fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
