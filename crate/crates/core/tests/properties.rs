use hyperci::monotonize::construct;
use hyperci::{coverage_curve, cstar_table, invert, pivot_table, Hypergeometric, Params};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = (usize, usize, f64)> {
    (2usize..=400).prop_flat_map(|population| (Just(population), 1..=population, 0.005f64..0.7))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn optimal_table_invariants((population, sample, alpha) in instance()) {
        let kernel = Hypergeometric::new(Params::new(population, sample, alpha).unwrap());
        let built = construct(&kernel).unwrap();
        prop_assert!(built.adjusted.is_monotone());
        prop_assert!(built.symmetrized.is_symmetric());
        prop_assert!(built.symmetrized.is_monotone());
        built.symmetrized.check_level(&kernel).unwrap();
        for m in 0..built.raw.len() {
            prop_assert_eq!(built.adjusted.cardinality(m), built.raw.cardinality(m));
        }

        let table = invert(&built.symmetrized).unwrap();
        prop_assert_eq!(table.total_size(), built.symmetrized.total_size());
        prop_assert_eq!(table.interval(0).0, 0);
        prop_assert_eq!(table.interval(sample).1, population);
        for x in 0..=sample {
            let (l, u) = table.interval(x);
            let (l2, u2) = table.interval(sample - x);
            prop_assert_eq!(l + u2, population);
            prop_assert_eq!(u + l2, population);
        }
        for c in coverage_curve(&kernel, &table).unwrap() {
            prop_assert!(c >= 1.0 - alpha - 1e-12);
        }
    }

    #[test]
    fn pivot_is_valid_and_never_smaller((population, sample, alpha) in instance()) {
        let kernel = Hypergeometric::new(Params::new(population, sample, alpha).unwrap());
        let pivot = pivot_table(&kernel).unwrap();
        let cstar = cstar_table(&kernel).unwrap();
        prop_assert!(pivot.total_size() >= cstar.total_size());
        for c in coverage_curve(&kernel, &pivot).unwrap() {
            prop_assert!(c >= 1.0 - alpha - 1e-12);
        }
    }
}
