use proptest::prelude::*;
use spectral_core::{
    c64, frame_at, inner, nonadiabatic_coupling, CMatrix, CVector, ConicalModel, FnFamily, Gauge,
    HamiltonianFamily, C64,
};

fn hermitian_from(seed: &[f64], n: usize) -> CMatrix {
    let mut it = seed.iter().cycle();
    let r = CMatrix::from_fn(n, n, |_, _| c64(*it.next().unwrap(), *it.next().unwrap()));
    (&r + r.adjoint()) * c64(0.5, 0.0)
}

fn smooth_family(seed: Vec<f64>) -> impl HamiltonianFamily {
    let h0 = hermitian_from(&seed, 3);
    let h1 = hermitian_from(&seed[3..], 3);
    let h2 = hermitian_from(&seed[7..], 3);
    let d = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(-3.0, 0.0), c64(0.0, 0.0), c64(3.0, 0.0)]));
    FnFamily::new(3, 2, move |x: &[f64]| {
        &d + &h0 * c64(0.3, 0.0) + &h1 * c64(x[0], 0.0) + &h2 * c64(x[1] * x[1], 0.0)
    })
}

/// `−i⟨a|∂_i a⟩` and `⟨b|∂_i a⟩` from vectors regauged by `e^{iχ(x)}`.
fn regauged_elements(
    fam: &dyn HamiltonianFamily,
    x: &[f64],
    a: usize,
    b: usize,
    dir: usize,
    chi: &dyn Fn(&[f64]) -> f64,
) -> (f64, C64) {
    let h = 1e-5;
    let vec_at = |y: &[f64], band: usize| {
        let f = frame_at(fam, y).unwrap().with_gauge(&Gauge::Component(0)).unwrap();
        f.vector(band) * C64::from_polar(1.0, chi(y))
    };
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    xp[dir] += h;
    xm[dir] -= h;
    let dv = (vec_at(&xp, a) - vec_at(&xm, a)) / c64(2.0 * h, 0.0);
    let va = vec_at(x, a);
    let vb = vec_at(x, b);
    ((c64(0.0, -1.0) * inner(&va, &dv)).re, inner(&vb, &dv))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gauge_covariance(p in -1.0f64..1.0, q in -1.0f64..1.0, x0 in -0.8f64..0.8, y0 in 0.3f64..1.2) {
        let fam = ConicalModel;
        let x = [x0, y0];
        let chi = move |y: &[f64]| p * y[0] * y[1] + q * y[0] * y[0];
        let zero = |_y: &[f64]| 0.0;
        for dir in 0..2 {
            let (diag0, off0) = regauged_elements(&fam, &x, 1, 0, dir, &zero);
            let (diag1, off1) = regauged_elements(&fam, &x, 1, 0, dir, &chi);
            let grad = if dir == 0 { p * x[1] + 2.0 * q * x[0] } else { p * x[0] };
            prop_assert!((off1.norm() - off0.norm()).abs() < 1e-8);
            prop_assert!((diag1 - diag0 - grad).abs() < 1e-7);
        }
    }

    #[test]
    fn coupling_methods_agree(seed in proptest::collection::vec(-1.0f64..1.0, 24), x0 in -0.5f64..0.5, y0 in -0.5f64..0.5) {
        let fam = smooth_family(seed);
        let x = [x0, y0];
        let f = frame_at(&fam, &x).unwrap();
        let gaps_ok = f.values.windows(2).all(|w| w[1] - w[0] > 0.2);
        prop_assume!(gaps_ok);
        let tol = f64::max(1e-6, 10.0 * fam.fd_step().powi(2));
        for dir in 0..2 {
            for (a, b) in [(0, 1), (1, 2), (2, 0)] {
                let c = nonadiabatic_coupling(&fam, &x, a, b, dir).unwrap();
                prop_assert!(c.discrepancy() < tol, "discrepancy {}", c.discrepancy());
            }
        }
    }

    #[test]
    fn frames_are_bit_deterministic(seed in proptest::collection::vec(-1.0f64..1.0, 24), x0 in -1.0f64..1.0) {
        let fam = smooth_family(seed);
        let a = frame_at(&fam, &[x0, 0.1]).unwrap();
        let b = frame_at(&fam, &[x0, 0.1]).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn frames_satisfy_eigen_invariants(seed in proptest::collection::vec(-1.0f64..1.0, 24), x0 in -1.0f64..1.0) {
        let fam = smooth_family(seed);
        let m = fam.hamiltonian(&[x0, -0.2]);
        let f = frame_at(&fam, &[x0, -0.2]).unwrap();
        for a in 0..3 {
            let v = f.vector(a);
            prop_assert!((&m * &v - &v * c64(f.values[a], 0.0)).norm() <= 1e-10 * m.norm());
        }
        prop_assert!((f.vectors.adjoint() * &f.vectors - CMatrix::identity(3, 3)).norm() < 1e-10);
        prop_assert!(f.values.windows(2).all(|w| w[0] <= w[1]));
    }
}
