use std::f64::consts::PI;
use std::sync::Arc;

use adiabatic_engine::{adiabatic_propagate_single, schrodinger_propagate};
use spectral_core::{path::Circle, ConicalModel, Gauge, ParameterPath};

fn circle_error(period: f64) -> f64 {
    let c = Circle::new(1.0, 2.0 * PI / period);
    let path = ParameterPath::from_curve(Arc::new(c), 0.0, period, 2001).unwrap();
    let ad = adiabatic_propagate_single(&ConicalModel, &path, 1, &Gauge::Component(0)).unwrap();
    let ex = schrodinger_propagate(&ConicalModel, &path, &ad.trajectory.states[0], 1e-11).unwrap();
    ad.trajectory.states.iter().zip(&ex.states).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

#[test]
fn error_falls_with_first_order_in_inverse_time() {
    let periods = [10.0, 20.0, 40.0, 80.0];
    let errs: Vec<f64> = periods.iter().map(|&t| circle_error(t)).collect();
    for w in errs.windows(2) {
        assert!(w[1] < w[0]);
    }
    let xs: Vec<f64> = periods.iter().map(|t: &f64| t.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / 4.0;
    let my = ys.iter().sum::<f64>() / 4.0;
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!(slope < -0.9, "slope {slope}, errors {errs:?}");
    // The tail is first order to within a few percent.
    assert!(errs[2] / errs[3] > 1.9);
}
