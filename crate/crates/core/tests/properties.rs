use gridspread_core::bounds::upper_bound;
use gridspread_core::construct::construct_auto;
use gridspread_core::metrics::{min_combined_naive, min_combined_pruned};
use gridspread_core::{Arrangement, ArrangementPair, GridSpec, Norm};
use proptest::prelude::*;

fn pair_from(spec: GridSpec, a: Vec<usize>, b: Vec<usize>) -> ArrangementPair {
    ArrangementPair::new(
        Arrangement::from_cells(spec, a).unwrap(),
        Arrangement::from_cells(spec, b).unwrap(),
    )
    .unwrap()
}

fn arb_pair() -> impl Strategy<Value = ArrangementPair> {
    (2usize..=6, 2usize..=4)
        .prop_filter("small grids", |&(n, d)| n.pow(d as u32) <= 256)
        .prop_flat_map(|(n, d)| {
            let count = n.pow(d as u32);
            let perm = || Just((0..count).collect::<Vec<_>>()).prop_shuffle();
            (Just(GridSpec::new(n, d).unwrap()), perm(), perm())
        })
        .prop_map(|(spec, a, b)| pair_from(spec, a, b))
}

fn arb_norm() -> impl Strategy<Value = Norm> {
    prop_oneof![Just(Norm::L(1)), Just(Norm::L(2)), Just(Norm::L(3)), Just(Norm::Inf)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn pruned_equals_naive_up_to_four_dimensions(pair in arb_pair(), norm in arb_norm()) {
        let naive = min_combined_naive(&pair, norm).unwrap();
        let pruned = min_combined_pruned(&pair, norm).unwrap();
        prop_assert!((naive.min_combined - pruned.min_combined).abs() <= 1e-9);
        prop_assert_eq!(naive.witness, pruned.witness);
    }

    #[test]
    fn minimum_never_exceeds_upper_bound(pair in arb_pair(), norm in arb_norm()) {
        let spec = *pair.spec();
        let min = min_combined_pruned(&pair, norm).unwrap().min_combined;
        prop_assert!(min <= upper_bound(spec.n() as u64, spec.d() as u64, norm) + 1e-9);
    }
}

#[test]
fn constructed_pairs_respect_upper_bound() {
    for (n, d) in [(10, 2), (25, 2), (37, 2), (64, 2), (9, 3), (12, 3)] {
        let spec = GridSpec::new(n, d).unwrap();
        let pair = construct_auto(spec).unwrap().0;
        for norm in [Norm::L(1), Norm::L(2), Norm::Inf] {
            let min = min_combined_pruned(&pair, norm).unwrap().min_combined;
            assert!(min <= upper_bound(n as u64, d as u64, norm) + 1e-9, "{spec} {norm}: {min}");
        }
    }
}
