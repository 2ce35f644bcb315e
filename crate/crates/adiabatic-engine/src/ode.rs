//! Dormand–Prince 5(4) with adaptive steps for complex state vectors.

use spectral_core::{CVector, C64};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size collapsed to {step:.3e} at t = {t:.9}")]
    StepCollapse { t: f64, step: f64 },
    #[error("step budget of {max_steps} exhausted at t = {t:.9}")]
    TooManySteps { t: f64, max_steps: usize },
    #[error("non-finite state at t = {t:.9}")]
    NonFinite { t: f64 },
    #[error("output times must be nondecreasing and start at or after t0")]
    BadStops,
}

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen from the span if absent.
    pub first_step: Option<f64>,
    /// Largest allowed step; unbounded if absent.
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, first_step: None, max_step: None, max_steps: 5_000_000 }
    }
}

impl OdeOptions {
    pub fn with_rtol(rtol: f64) -> Self {
        Self { rtol, atol: rtol * 1e-2, ..Self::default() }
    }
}

#[derive(Clone, Debug, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Differences between the fifth- and fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(y: &CVector, terms: &[(f64, &CVector)], h: f64) -> CVector {
    let mut out = y.clone();
    for (c, k) in terms {
        if *c != 0.0 {
            out.axpy(C64::new(h * c, 0.0), k, C64::new(1.0, 0.0));
        }
    }
    out
}

fn error_norm(err: &CVector, y0: &CVector, y1: &CVector, opts: &OdeOptions) -> f64 {
    let n = err.len().max(1) as f64;
    let s: f64 = err
        .iter()
        .zip(y0.iter().zip(y1.iter()))
        .map(|(e, (a, b))| {
            let sc = opts.atol + opts.rtol * a.norm().max(b.norm());
            (e.norm() / sc).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

/// Integrates `y' = f(t, y)` from `t0`, returning the state at each of `stops`.
/// Steps never straddle a stop, so kinks placed in `stops` are resolved exactly.
pub fn integrate<F>(mut f: F, t0: f64, y0: &CVector, stops: &[f64], opts: &OdeOptions) -> Result<(Vec<CVector>, OdeStats), OdeError>
where
    F: FnMut(f64, &CVector) -> CVector,
{
    if stops.first().is_some_and(|&s| s < t0) || stops.windows(2).any(|w| w[1] < w[0]) {
        return Err(OdeError::BadStops);
    }
    let mut stats = OdeStats::default();
    let mut out = Vec::with_capacity(stops.len());
    let mut t = t0;
    let mut y = y0.clone();
    let span = stops.last().map(|s| s - t0).unwrap_or(0.0).abs().max(1e-300);
    let mut h = opts.first_step.unwrap_or(span * 1e-3).min(opts.max_step.unwrap_or(f64::INFINITY));
    let mut k1 = f(t, &y);
    stats.evaluations += 1;
    for &stop in stops {
        while t < stop {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(OdeError::TooManySteps { t, max_steps: opts.max_steps });
            }
            let remaining = stop - t;
            let mut step = h.min(remaining);
            let last = step >= remaining * (1.0 - 1e-12);
            if last {
                step = remaining;
            }
            if step < 1e-14 * t.abs().max(span) {
                return Err(OdeError::StepCollapse { t, step });
            }
            let k2 = f(t + C2 * step, &axpy(&y, &[(A21, &k1)], step));
            let k3 = f(t + C3 * step, &axpy(&y, &[(A31, &k1), (A32, &k2)], step));
            let k4 = f(t + C4 * step, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], step));
            let k5 = f(t + C5 * step, &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], step));
            let t_new = if last { stop } else { t + step };
            let k6 = f(t_new, &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], step));
            let y_new = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], step);
            let k7 = f(t_new, &y_new);
            stats.evaluations += 6;
            let zero = CVector::zeros(y.len());
            let err = axpy(&zero, &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)], step);
            let en = error_norm(&err, &y, &y_new, opts);
            if !en.is_finite() {
                if y_new.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) && step < 1e-10 * span {
                    return Err(OdeError::NonFinite { t });
                }
                h = step * 0.1;
                stats.rejected += 1;
                continue;
            }
            if en <= 1.0 {
                t = t_new;
                y = y_new;
                k1 = k7;
                stats.accepted += 1;
                let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || fac < 1.0 {
                    h = step * fac;
                }
            } else {
                stats.rejected += 1;
                h = step * (0.9 * en.powf(-0.2)).clamp(0.1, 0.9);
            }
            if let Some(m) = opts.max_step {
                h = h.min(m);
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}
