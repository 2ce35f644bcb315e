use std::f64::consts::PI;
use std::sync::Arc;

use gauge_geometry::*;
use proptest::prelude::*;
use spectral_core::{path::Circle, ConicalModel, Gauge, ParameterPath, SpinField};

fn on_sphere(r: f64, th: f64, ph: f64) -> Vec<f64> {
    vec![r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()]
}

fn twisted_curl(x: &[f64], twist: &dyn Fn(&[f64]) -> f64, h: f64) -> [f64; 3] {
    let fam = SpinField::default();
    let a = |i: usize, s: f64| {
        let mut y = x.to_vec();
        y[i] += s;
        twisted_connection(&fam, &y, 0, &[0, 1, 2], &Gauge::Component(1), twist).unwrap().a
    };
    let d = |i: usize, j: usize| (a(i, h)[j] - a(i, -h)[j]) / (2.0 * h);
    [d(0, 1) - d(1, 0), d(0, 2) - d(2, 0), d(1, 2) - d(2, 1)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn curvature_ignores_regauging(
        r in 0.6f64..2.0, th in 0.3f64..2.8, ph in -PI..PI,
        a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0,
    ) {
        let x = on_sphere(r, th, ph);
        let twist = move |y: &[f64]| a * y[0] * y[1] + b * y[0].sin() + c * y[2] * y[2];
        let f = berry_curvature(&SpinField::default(), &x, 0).unwrap();
        let g = twisted_curl(&x, &twist, 1e-3);
        let plain = twisted_curl(&x, &|_: &[f64]| 0.0, 1e-3);
        for k in 0..3 {
            prop_assert!((g[k] - plain[k]).abs() < 1e-6, "pair {k}: {} vs {}", g[k], plain[k]);
        }
        prop_assert!(!f.flagged);
    }

    #[test]
    fn flat_region_loops_vanish(cx in 1.5f64..3.0, cy in -1.0f64..1.0, r in 0.1f64..1.0) {
        let circle = Circle { center: [cx, cy], ..Circle::new(r, 1.0) };
        let p = ParameterPath::from_curve(Arc::new(circle), 0.0, 2.0 * PI, 401).unwrap();
        for band in [0, 1] {
            let c = loop_circulation(&ConicalModel, &p, band, &Gauge::LargestComponent).unwrap();
            prop_assert!(c.raw.abs() < 1e-6, "{c:?}");
        }
    }

    #[test]
    fn charge_is_gauge_free_and_integral(cx in -0.3f64..0.3, cy in -0.3f64..0.3, r in 0.5f64..1.5) {
        let fam = SpinField::default();
        let q = monopole_charge_on(&fam, &[cx, cy, 0.1], r, 0, SphereMesh { n_theta: 24, n_phi: 48 }).unwrap();
        prop_assert_eq!(q.charge, -1);
        prop_assert!(q.residual < 1e-9);
    }
}

#[test]
fn curvature_routes_converge_quadratically() {
    let fam = SpinField::default();
    let x = [0.3, -0.4, 0.5];
    let e1 = berry_curvature_step(&fam, &x, 1, 4e-2).unwrap().discrepancy;
    let e2 = berry_curvature_step(&fam, &x, 1, 2e-2).unwrap().discrepancy;
    let e3 = berry_curvature_step(&fam, &x, 1, 1e-2).unwrap().discrepancy;
    assert!(e1 / e2 > 3.5 && e2 / e3 > 3.5, "{e1} {e2} {e3}");
}

#[test]
fn cone_potential_matches_the_closed_form() {
    for (x, y) in [(0.0, 1.0), (0.7, -0.3), (-1.5, 2.0)] {
        let r2: f64 = x * x + y * y;
        let up = berry_connection(&ConicalModel, &[x, y], 1, &[0, 1], &Gauge::Component(0)).unwrap();
        let lo = berry_connection(&ConicalModel, &[x, y], 0, &[0, 1], &Gauge::Component(1)).unwrap();
        // A± = ∓(y, −x)/(2r²)
        assert!((up.a[0] + y / (2.0 * r2)).abs() < 1e-6 && (up.a[1] - x / (2.0 * r2)).abs() < 1e-6, "{up:?}");
        assert!((lo.a[0] - y / (2.0 * r2)).abs() < 1e-6 && (lo.a[1] + x / (2.0 * r2)).abs() < 1e-6, "{lo:?}");
    }
}
