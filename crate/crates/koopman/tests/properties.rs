use koopman::{sk_generator, LiouvilleOperator, NodeHamiltonians, PeriodicGrid};
use proptest::prelude::*;
use spectral_core::{c64, ConicalModel, CVector, C64};

fn vector(len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| c64(a, b)), len)
}

proptest! {
    #[test]
    fn rotation_generator_is_skew(m in 6usize..40, omega in -2.0f64..2.0, seed in vector(80)) {
        let op = LiouvilleOperator::rotation(PeriodicGrid::new(m).unwrap(), omega);
        let f = &seed[..m];
        let g = &seed[40..40 + m];
        let lhs: C64 = f.iter().zip(op.apply(g)).map(|(a, b)| a.conj() * b).sum();
        let rhs: C64 = op.apply(f).iter().zip(g).map(|(a, b)| a.conj() * b).sum();
        prop_assert!((lhs + rhs).norm() < 1e-10 * (1.0 + omega.abs() * m as f64));
    }

    #[test]
    fn joint_generator_conserves_the_norm(m in 6usize..32, omega in -1.0f64..1.0, seed in vector(64)) {
        let op = LiouvilleOperator::rotation(PeriodicGrid::new(m).unwrap(), omega);
        let h = NodeHamiltonians::sample(&ConicalModel, &op, |t| vec![t.cos(), 0.5 * t.sin()]);
        let y = CVector::from_vec(seed[..2 * m].to_vec());
        let rate = (y.dotc(&sk_generator(&h, &op, 2, &y))).re;
        prop_assert!(rate.abs() < 1e-10 * (1.0 + m as f64));
    }

    #[test]
    fn derivative_is_exact_below_nyquist(m in 8usize..64, k in -3i64..=3, shift in 0.0f64..6.3) {
        let g = PeriodicGrid::new(m).unwrap();
        let op = LiouvilleOperator::rotation(g, 1.0);
        let f: Vec<C64> = g.nodes().iter().map(|t| C64::from_polar(1.0, k as f64 * (t - shift))).collect();
        for (d, v) in op.derivative(&f).iter().zip(&f) {
            prop_assert!((d - v * c64(0.0, k as f64)).norm() < 1e-10);
        }
    }
}
