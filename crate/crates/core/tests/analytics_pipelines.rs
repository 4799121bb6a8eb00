mod common;

use boat_core::{
    analytics::{cap_analysis, cost_comparison, percent_change, trend_by_group, TrendMetric},
    engine::{filter, group_aggregate, AggFunction, AggregateSpec, Clause, Literal, Predicate},
    synth::oracle::{naive_cap, naive_cost_comparison, naive_trend, read_records},
    Frame,
};
use common::*;
use proptest::prelude::*;
use std::sync::OnceLock;

struct Fixture {
    records: Vec<boat_core::synth::oracle::OracleRecord>,
    frame: Frame,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let (bytes, _, frame, _) = synth_frame(&scaled_profile(30_000, 0.0, 99));
        Fixture { records: read_records(&bytes), frame }
    })
}

fn text(field: &str, value: &str) -> Clause {
    Clause::equals(field, Literal::Text(value.into()))
}

const HIP: &str = "HIP REPLACEMENT,TOT/PRT";

#[test]
fn percent_change_reference_values() {
    assert_eq!(percent_change(100, 140).unwrap(), 40.0);
    let livebirths = percent_change(110_000_000_000, 145_000_000_000).unwrap();
    assert!((livebirths - 31.82).abs() < 0.01, "{livebirths}");
    assert!(percent_change(0, 5).is_err());
}

proptest! {
    #[test]
    fn percent_change_scale_invariant(a in 1i64..1_000_000_000, b in 0i64..1_000_000_000, k in 1i64..1_000_000) {
        prop_assert_eq!(percent_change(a * k, b * k).unwrap().to_bits(), percent_change(a, b).unwrap().to_bits());
    }

    #[test]
    fn cap_fraction_monotone(mut t in proptest::collection::vec(0i64..20_000_000, 2..12)) {
        let f = &fixture().frame;
        let slice = Predicate::all().and(text("procedure", HIP));
        t.sort();
        let mut last = 0.0;
        for threshold in t {
            let v = cap_analysis(f, &slice, threshold, 0, 250_000, 60).unwrap().fraction_below.value();
            prop_assert!(v >= last);
            last = v;
        }
    }
}

#[test]
fn cost_comparison_matches_oracle_pipeline() {
    let fx = fixture();
    let slice = Predicate::all().and(text("age_group", "0 to 17"));
    let got = cost_comparison(&fx.frame, &slice, "diagnosis", (2009, 2014), Some(11), 0).unwrap();
    let want = naive_cost_comparison(
        &fx.records,
        |r| r.age_group == "0 to 17",
        |r| r.diagnosis.clone(),
        "CCS Diagnosis Description",
        (2009, 2014),
        Some(11),
        0,
    );
    assert_eq!(got.rows.len(), 11);
    assert_eq!(got, want);

    let skipped = cost_comparison(&fx.frame, &slice, "diagnosis", (2009, 2014), Some(5), 1).unwrap();
    assert_eq!(skipped.rows[..], got.rows[1..6]);
}

#[test]
fn cost_comparison_conserves_totals() {
    let fx = fixture();
    let slice = Predicate::all().and(text("age_group", "0 to 17"));
    let table = cost_comparison(&fx.frame, &slice, "county", (2009, 2014), None, 0).unwrap();
    let sliced = filter(&fx.frame, &slice).unwrap();
    let by_year = group_aggregate(&sliced, &["Discharge Year"], &[AggregateSpec::new(AggFunction::Sum, "Total Costs", "s")]).unwrap();
    let years = by_year.integers("Discharge Year").unwrap();
    let sums = by_year.integers("s").unwrap();
    for (slot, year) in [2009, 2014].into_iter().enumerate() {
        let expected = years.iter().zip(sums).find(|(y, _)| **y == Some(year)).and_then(|(_, s)| *s).unwrap();
        assert_eq!(table.rows.iter().map(|r| r.totals[slot]).sum::<i64>(), expected);
    }
}

#[test]
fn trend_matches_oracle_per_cell() {
    let fx = fixture();
    let slice = Predicate::all().and(text("diagnosis", "MOOD DISORDERS"));
    let years: Vec<i64> = (2009..=2014).collect();
    for metric in [TrendMetric::Count, TrendMetric::MeanCost, TrendMetric::SumCost] {
        let got = trend_by_group(&fx.frame, &slice, "facility", metric, &years, 8).unwrap();
        let want = naive_trend(&fx.records, |r| r.diagnosis == "MOOD DISORDERS", |r| r.facility.clone(), metric, &years, 8);
        assert_eq!(got.len(), 8);
        assert_eq!(got, want, "{metric:?}");
    }
}

#[test]
fn trend_labels_ignore_row_order() {
    let fx = fixture();
    let slice = Predicate::all().and(text("diagnosis", "MOOD DISORDERS"));
    let years = [2009, 2014];
    let labels = |f: &Frame| -> Vec<String> {
        let mut l: Vec<String> = trend_by_group(f, &slice, "county", TrendMetric::Count, &years, 5)
            .unwrap()
            .into_iter()
            .map(|s| s.group_label)
            .collect();
        l.sort();
        l
    };
    let base = labels(&fx.frame);
    for seed in 0..5 {
        assert_eq!(labels(&shuffled(&fx.frame, seed)), base);
    }
}

#[test]
fn cap_matches_oracle_and_filter_count() {
    let fx = fixture();
    let slice = Predicate::all().and(text("procedure", HIP));
    let got = cap_analysis(&fx.frame, &slice, 3_000_000, 0, 250_000, 60).unwrap();
    let want = naive_cap(&fx.records, |r| r.procedure == HIP, 3_000_000, 0, 250_000, 60).unwrap();
    assert_eq!(got, want);
    assert_eq!(got.n as usize, filter(&fx.frame, &slice).unwrap().row_count());

    let empty = Predicate::all().and(text("procedure", "NO SUCH PROCEDURE"));
    let err = cap_analysis(&fx.frame, &empty, 3_000_000, 0, 250_000, 60).unwrap_err();
    assert!(err.to_string().contains("NO SUCH PROCEDURE"), "{err}");
}

#[test]
fn bundled_profile_hip_cohort_shape() {
    let profile = boat_core::synth::CohortProfile::bundled();
    let (bytes, _, _, _) = synth_frame(&profile);
    let records = read_records(&bytes);
    let cap = naive_cap(&records, |r| r.procedure == HIP && r.year == 2014, 3_000_000, 0, 250_000, 60).unwrap();
    let fraction = cap.fraction_below.below as f64 / cap.fraction_below.total as f64;
    assert!((0.85..=0.91).contains(&fraction), "{fraction}");
    assert!((2_000_000..=2_500_000).contains(&cap.mean), "{}", cap.mean);
}
