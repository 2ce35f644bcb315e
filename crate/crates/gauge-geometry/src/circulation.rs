use std::f64::consts::PI;

use spectral_core::{frame_at, inner, matched_vector, EigenFrame, Gauge, HamiltonianFamily, ParameterPath};

use crate::{berry_connection, GeometryError};

/// Loop integral of the connection in a gauge that is single valued on the loop.
#[derive(Clone, Debug, PartialEq)]
pub struct Circulation {
    pub raw: f64,
    /// `raw / 2π`.
    pub turns: f64,
    /// Sample indices at which the largest-component gauge changed component.
    pub switches: Vec<usize>,
}

impl Circulation {
    pub fn holonomy(&self) -> spectral_core::C64 {
        spectral_core::C64::from_polar(1.0, self.raw)
    }
}

/// Relative modulus below which the current component is abandoned in
/// largest-component mode.
const SWITCH_RATIO: f64 = 0.5;

/// Trapezoid quadrature of `A · ẋ` over a closed sampled loop.
///
/// Fixed gauges (`Component`, `Section`, `Sections`) are used as given.
/// `LargestComponent` starts on the dominant component and moves to a new one
/// whenever the active component falls below half the largest modulus; each
/// move and the closing mismatch contribute their transition phase so the
/// total equals the circulation of one continuous, single-valued section.
pub fn loop_circulation<F: HamiltonianFamily + ?Sized>(
    family: &F,
    path: &ParameterPath,
    band: usize,
    gauge: &Gauge,
) -> Result<Circulation, GeometryError> {
    let pts = path.points();
    let n = pts.len();
    if n < 3 {
        return Err(GeometryError::Invalid("loop needs at least three samples".into()));
    }
    let gap = pts[0].iter().zip(&pts[n - 1]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let size = pts.iter().flatten().fold(1.0f64, |m, c| m.max(c.abs()));
    if gap > 1e-9 * size {
        return Err(GeometryError::OpenLoop { gap });
    }
    let dirs: Vec<usize> = (0..family.n_params()).collect();
    let times = path.times();
    let frames: Vec<EigenFrame> = pts.iter().map(|x| frame_at(family, x)).collect::<Result<_, _>>()?;

    let choose = |k: usize, current: Option<usize>| -> Gauge {
        match gauge {
            Gauge::LargestComponent | Gauge::Matched => {
                let v = frames[k].vector(band);
                let top = v.iter().fold(0.0f64, |m, z| m.max(z.norm()));
                match current {
                    Some(c) if v[c].norm() >= SWITCH_RATIO * top => Gauge::Component(c),
                    _ => Gauge::Component(frames[k].dominant_component(band)),
                }
            }
            g => g.clone(),
        }
    };
    let comp = |g: &Gauge| if let Gauge::Component(c) = g { Some(*c) } else { None };
    let integrand = |k: usize, g: &Gauge| -> Result<f64, GeometryError> {
        let a = berry_connection(family, &pts[k], band, &dirs, g)?.a;
        let v = path.velocity(times[k]);
        Ok(a.iter().zip(&v).map(|(a, v)| a * v).sum())
    };
    let section = |k: usize, g: &Gauge| matched_vector(family, &pts[k], &frames[k], band, g);

    let first = choose(0, None);
    let mut active = first.clone();
    let mut prev = integrand(0, &active)?;
    let mut raw = 0.0;
    let mut switches = Vec::new();
    for k in 1..n {
        let here = integrand(k, &active)?;
        raw += 0.5 * (times[k] - times[k - 1]) * (prev + here);
        prev = here;
        let next = choose(k, comp(&active));
        if next != active {
            raw += inner(&section(k, &active)?, &section(k, &next)?).arg();
            switches.push(k);
            active = next;
            prev = integrand(k, &active)?;
        }
    }
    raw -= inner(&section(n - 1, &first)?, &section(n - 1, &active)?).arg();
    Ok(Circulation { raw, turns: raw / (2.0 * PI), switches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::{path::Circle, ConicalModel, FnCurve};
    use std::sync::Arc;

    fn circle(r: f64, turns: f64, center: [f64; 2]) -> ParameterPath {
        let c = Circle { center, ..Circle::new(r, 1.0) };
        ParameterPath::from_curve(Arc::new(c), 0.0, 2.0 * PI * turns, (400.0 * turns) as usize + 1).unwrap()
    }

    #[test]
    fn unit_circle_gives_plus_and_minus_pi() {
        let p = circle(1.0, 1.0, [0.0, 0.0]);
        let up = loop_circulation(&ConicalModel, &p, 1, &Gauge::Component(0)).unwrap();
        let lo = loop_circulation(&ConicalModel, &p, 0, &Gauge::Component(1)).unwrap();
        assert!((up.raw - PI).abs() < 1e-6, "{up:?}");
        assert!((lo.raw + PI).abs() < 1e-6, "{lo:?}");
        assert!((up.turns - 0.5).abs() < 1e-6);
        assert!((up.holonomy() + 1.0).norm() < 1e-6);
    }

    #[test]
    fn double_winding_gives_two_pi() {
        let p = circle(1.0, 2.0, [0.0, 0.0]);
        let up = loop_circulation(&ConicalModel, &p, 1, &Gauge::Component(0)).unwrap();
        assert!((up.raw - 2.0 * PI).abs() < 1e-6, "{up:?}");
    }

    #[test]
    fn loop_away_from_the_crossing_is_trivial() {
        let p = circle(0.5, 1.0, [2.0, 1.0]);
        for band in [0, 1] {
            let c = loop_circulation(&ConicalModel, &p, band, &Gauge::LargestComponent).unwrap();
            assert!(c.raw.abs() < 1e-6, "{c:?}");
        }
    }

    #[test]
    fn component_switches_are_glued() {
        // An ellipse on which both components of the lower band take turns dominating.
        let curve = FnCurve::new(
            3,
            |t: f64| vec![0.5 * t.cos(), 0.5 * t.sin(), 0.9 * (2.0 * t).cos()],
            |t: f64| vec![-0.5 * t.sin(), 0.5 * t.cos(), -1.8 * (2.0 * t).sin()],
        );
        let p = ParameterPath::from_curve(Arc::new(curve), 0.0, 2.0 * PI, 2001).unwrap();
        let fam = spectral_core::SpinField::default();
        let lc = loop_circulation(&fam, &p, 0, &Gauge::LargestComponent).unwrap();
        assert!(!lc.switches.is_empty());
        let fixed = loop_circulation(&fam, &p, 0, &Gauge::Component(0)).unwrap();
        let d = (lc.raw - fixed.raw) / (2.0 * PI);
        assert!((d - d.round()).abs() < 1e-5, "{lc:?} vs {fixed:?}");
    }

    #[test]
    fn open_loop_is_refused() {
        let c = Circle::new(1.0, 1.0);
        let p = ParameterPath::from_curve(Arc::new(c), 0.0, 3.0, 101).unwrap();
        assert!(matches!(loop_circulation(&ConicalModel, &p, 0, &Gauge::Component(0)), Err(GeometryError::OpenLoop { .. })));
    }
}
