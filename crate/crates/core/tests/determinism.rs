mod common;

use boat_core::engine::{
    describe, fraction_below, group_aggregate, group_aggregate_parallel, histogram, percentile, top_n, AggFunction,
    AggregateSpec, PartialAggregate,
};
use common::*;
use proptest::prelude::*;

fn aggs() -> Vec<AggregateSpec> {
    vec![
        AggregateSpec::count("rows"),
        AggregateSpec::new(AggFunction::Sum, "cost", "sum"),
        AggregateSpec::new(AggFunction::Mean, "cost", "mean"),
        AggregateSpec::new(AggFunction::StdSample, "cost", "std"),
        AggregateSpec::new(AggFunction::Min, "extra", "min"),
        AggregateSpec::new(AggFunction::Max, "extra", "max"),
    ]
}

fn std_bits(frame: &boat_core::Frame) -> Vec<Option<u64>> {
    match frame.column("std").unwrap() {
        boat_core::Column::Float(v) => v.iter().map(|x| x.map(f64::to_bits)).collect(),
        other => panic!("unexpected {:?}", other.data_type()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn permutation_invariance(rows in arb_rows(1000), seed in any::<u64>(), n in 0usize..20) {
        let frame = frame_from_rows(&rows);
        let perm = shuffled(&frame, seed);
        let keys = ["label", "bucket"];
        let a = group_aggregate(&frame, &keys, &aggs()).unwrap();
        let b = group_aggregate(&perm, &keys, &aggs()).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(std_bits(&a), std_bits(&b));
        prop_assert_eq!(top_n(&a, "sum", n).unwrap(), top_n(&b, "sum", n).unwrap());
        prop_assert_eq!(top_n(&frame, "cost", n).unwrap(), top_n(&perm, "cost", n).unwrap());

        let (x, y) = (frame.integers("cost").unwrap(), perm.integers("cost").unwrap());
        prop_assert_eq!(histogram(x, 0, 1_000_000, 40).unwrap(), histogram(y, 0, 1_000_000, 40).unwrap());
        let (dx, dy) = (describe(x), describe(y));
        prop_assert_eq!(dx.std_sample.map(f64::to_bits), dy.std_sample.map(f64::to_bits));
        prop_assert_eq!(dx, dy);
        prop_assert_eq!(fraction_below(x, 5_000_000).ok(), fraction_below(y, 5_000_000).ok());
        prop_assert_eq!(percentile(x, 88.0).ok(), percentile(y, 88.0).ok());
    }

    #[test]
    fn partition_invariance(rows in arb_rows(1000)) {
        let frame = frame_from_rows(&rows);
        let keys = ["label"];
        let sequential = group_aggregate(&frame, &keys, &aggs()).unwrap();
        for parts in [1, 2, 3, 7, 16] {
            let mut merged = PartialAggregate::compute(&frame.slice(0..0), &keys, &aggs()).unwrap();
            for part in frame.partition(parts) {
                merged.merge(PartialAggregate::compute(&part, &keys, &aggs()).unwrap()).unwrap();
            }
            let merged = merged.finish().unwrap();
            prop_assert_eq!(std_bits(&merged), std_bits(&sequential));
            prop_assert_eq!(&merged, &sequential);
            prop_assert_eq!(group_aggregate_parallel(&frame, &keys, &aggs(), parts).unwrap(), sequential.clone());
        }
    }

    #[test]
    fn conservation_and_histogram_mass(rows in arb_rows(1000), lo in 0i64..1_000_000, w in 1i64..2_000_000, bins in 1usize..50) {
        let frame = frame_from_rows(&rows);
        let spec = [AggregateSpec::new(AggFunction::Count, "cost", "n"), AggregateSpec::new(AggFunction::Sum, "cost", "s")];
        let g = group_aggregate(&frame, &["label"], &spec).unwrap();
        let costs = frame.integers("cost").unwrap();
        let non_null = costs.iter().flatten().count() as i64;
        let total: i64 = costs.iter().flatten().sum();
        prop_assert_eq!(g.integers("n").unwrap().iter().flatten().sum::<i64>(), non_null);
        prop_assert_eq!(g.integers("s").unwrap().iter().flatten().sum::<i64>(), total);

        let h = histogram(costs, lo, w, bins).unwrap();
        prop_assert_eq!(h.total(), non_null as u64);
    }
}
