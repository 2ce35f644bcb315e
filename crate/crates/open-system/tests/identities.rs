use open_system::{
    bipartite_oracle, eigen_mixed_state, operator_connection, quarter_arc, weak_adiabatic_propagate, Flavor, QubitBath,
};

const EPS: f64 = 0.01;

#[test]
fn averaged_connections_reduce_to_the_berry_connection() {
    let m = QubitBath::new(EPS);
    for x in [[0.6, 0.8], [1.0, 0.0], [-0.3, 1.2]] {
        for flavor in [Flavor::CalA, Flavor::FrakA] {
            let c = operator_connection(&m, 1, 0, &x, flavor).unwrap();
            for (avg, scalar) in c.averages().iter().zip(&c.scalar) {
                assert!((avg.re - scalar).abs() < 1e-8 && avg.im.abs() < 1e-8, "{flavor:?} at {x:?}: {avg} vs {scalar}");
            }
        }
    }
}

#[test]
fn impurity_is_second_order_in_the_coupling() {
    let loss = |e: f64| 1.0 - eigen_mixed_state(&QubitBath::new(e), 1, 0, &[0.6, 0.8]).unwrap().rho.purity();
    let ratio = loss(EPS) / loss(EPS / 2.0);
    assert!((ratio - 4.0).abs() < 0.5, "{ratio}");
}

#[test]
fn weak_transport_tracks_the_bipartite_evolution() {
    let m = QubitBath::new(EPS);
    let path = quarter_arc(150.0, 1501).unwrap();
    let oracle = bipartite_oracle(&m, &path, 1, 0, 1e-10).unwrap();
    for flavor in [Flavor::CalA, Flavor::FrakA] {
        let run = weak_adiabatic_propagate(&m, &path, 1, 0, flavor).unwrap();
        let worst = run
            .states
            .iter()
            .zip(&oracle)
            .map(|(s, o)| open_system::density::trace_distance(s, o.matrix()))
            .fold(0.0, f64::max);
        assert!(worst < 5.0 * EPS, "{flavor:?}: {worst}");
        assert!(run.warnings.is_empty(), "{:?}", run.warnings);
    }
}
