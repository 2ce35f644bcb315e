use std::f64::consts::FRAC_PI_2;

use fuzzy_gravity::{coherent_im_z, coherent_state, single_sheet_decay, FockSpace, Generator, Wormhole};
use spectral_core::{c64, inner, C64};

#[test]
fn imaginary_height_closed_form() {
    for r in [0.0, 0.5, 1.0, 2.0, 3.0] {
        for phase in [0.0, 1.3] {
            let got = coherent_im_z(C64::from_polar(r, phase), 64).unwrap();
            assert!((got + FRAC_PI_2 * (-r * r).exp()).abs() < 1e-8, "{r}");
        }
    }
}

#[test]
fn vacuum_sheet_dissipates_in_two_over_pi() {
    let w = Wormhole::new(64).unwrap();
    let fit = single_sheet_decay(&w, c64(0.0, 0.0), 3.0, 61, Generator::Dissipative).unwrap();
    assert!((fit.rate - FRAC_PI_2).abs() < 0.02 * FRAC_PI_2, "{}", fit.rate);
    let far = single_sheet_decay(&w, c64(3.0, 0.0), 3.0, 61, Generator::Dissipative).unwrap();
    assert!(far.rate < 1e-3);
}

#[test]
fn coherent_overlaps_follow_the_closed_form() {
    let f = FockSpace::new(64).unwrap();
    let s = coherent_state(c64(1.0, 0.0), 64).unwrap();
    let mean = inner(&s.vector, &(&f.annihilation * &s.vector));
    assert!((mean - c64(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn single_sheets_bound_the_double_sheet() {
    let w = Wormhole::new(48).unwrap();
    let mut last = f64::INFINITY;
    for r in [1.5, 2.0, 2.5, 3.0] {
        let (up, down) = w.single_sheet_minima(c64(r, 0.0)).unwrap();
        let pair = w.solve(c64(r, 0.0)).unwrap();
        assert!((up - down).abs() < 1e-9);
        // The sheet coupling only raises the minimal modulus, less so as it decays.
        let gap = pair.plus.lambda.abs() - up;
        assert!(gap > 0.0 && gap < last, "{r}: {} vs {up}", pair.plus.lambda);
        last = gap;
    }
    assert!(last < 1e-4, "{last}");
}
