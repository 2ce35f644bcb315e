use cli_io::{format_real, Cell, Table};
use proptest::prelude::*;

proptest! {
    #[test]
    fn formatted_reals_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let s = format_real(v);
        let back: f64 = s.parse().unwrap();
        prop_assert!(back == v || (v == 0.0 && back == 0.0));
    }

    #[test]
    fn every_row_has_the_header_width(data in prop::collection::vec((-1e6f64..1e6, any::<i32>()), 0..20)) {
        let mut t = Table::new(&["a", "b"]);
        for (x, k) in &data {
            t.push(vec![Cell::Real(*x), Cell::Int(*k as i64)]);
        }
        let csv = t.to_csv();
        prop_assert_eq!(csv.lines().count(), data.len() + 1);
        prop_assert!(csv.lines().all(|l| l.split(',').count() == 2));
        prop_assert!(csv.ends_with('\n') && !csv.contains('\r'));
    }
}
