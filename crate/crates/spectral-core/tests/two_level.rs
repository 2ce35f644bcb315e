use spectral_core::{c64, frame_at, CVector, ConicalModel, Gauge};

#[test]
fn eigenpairs_match_closed_form_on_a_grid() {
    for i in 0..100 {
        for j in 0..100 {
            let x = -2.0 + 4.0 * (i as f64 + 0.5) / 100.0;
            let y = -2.0 + 4.0 * (j as f64 + 0.5) / 100.0;
            let r = x.hypot(y);
            let th = y.atan2(x);
            let f = frame_at(&ConicalModel, &[x, y]).unwrap().with_gauge(&Gauge::Component(0)).unwrap();
            assert!((f.values[0] + r).abs() < 1e-12 && (f.values[1] - r).abs() < 1e-12);
            let s = 1.0 / 2f64.sqrt();
            let plus = CVector::from_vec(vec![c64(s, 0.0), c64(s * th.cos(), s * th.sin())]);
            let minus = CVector::from_vec(vec![c64(s, 0.0), c64(-s * th.cos(), -s * th.sin())]);
            assert!((f.vector(1) - plus).norm() < 1e-12);
            assert!((f.vector(0) - minus).norm() < 1e-12);
        }
    }
}
