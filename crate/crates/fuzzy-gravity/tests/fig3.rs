use fuzzy_gravity::{fig3_report, Wormhole};
use spectral_core::c64;

#[test]
fn double_sheet_profile_properties() {
    let r = fig3_report(32, 3.0, 31).unwrap();
    assert!(r.failures.is_empty(), "{:?}", r.failures);
    assert!(r.symmetry < 1e-9);
    assert_eq!(r.brackets.len(), 1, "{:?}", r.brackets);
    assert!((r.crossing_probability.unwrap() - 0.5).abs() < 0.02);
    assert!(r.monotone_near_crossing);
    assert!(r.truncation_change < 1e-6, "{}", r.truncation_change);
    for row in &r.rows {
        assert!((row.p_up_plus + row.p_up_minus - 1.0).abs() < 1e-10);
    }
}

#[test]
fn sheet_swap_sits_inside_the_throat() {
    // The label swap is driven by the c-number Im z(α) in the sheet coupling,
    // which only exists for |α| < 1.
    let r = fig3_report(32, 1.5, 31).unwrap();
    let c = r.crossing.unwrap();
    assert!(c > 0.4 && c < 0.5, "{c}");
    assert!((r.throat_probability - 0.586).abs() < 0.01, "{}", r.throat_probability);
}

#[test]
fn profile_undershoots_the_classical_height() {
    // ⟨ln(√n + √(n−1))⟩ in a coherent state lies below the same function at ⟨n⟩ = |α|²,
    // which is z(|α|); the gap closes slowly with |α|.
    let w = Wormhole::new(64).unwrap();
    let mut last = f64::INFINITY;
    for r in [1.5, 2.0, 2.5, 3.0] {
        let p = w.solve(c64(r, 0.0)).unwrap();
        let z = r.acosh();
        let miss = (z - p.plus.re_z) / z;
        assert!(miss > 0.0 && miss < last, "{r}: {miss}");
        last = miss;
    }
    assert!(last < 0.05);
}

#[test]
fn far_field_coupling_is_small_but_finite() {
    let w = Wormhole::new(64).unwrap();
    let p = w.solve(c64(3.0, 0.0)).unwrap();
    assert!(p.coupling > 1e-6 && p.coupling < 1e-5, "{}", p.coupling);
    let near = w.solve(c64(2.0, 0.0)).unwrap();
    assert!(near.coupling > p.coupling);
}
