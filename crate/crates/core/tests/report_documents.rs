mod common;

use boat_core::{
    analytics::{cap_analysis, cost_comparison, trend_by_group, TrendMetric},
    engine::{Clause, Literal, Predicate},
    report::{emit_bar, emit_histogram, emit_lines, Datum, PlotDocument, Provenance},
};
use common::*;

fn provenance(rows: usize, filter: &str) -> Provenance {
    Provenance { source_rows: rows as u64, filters: vec![filter.to_string()] }
}

#[test]
fn synthetic_documents_round_trip() {
    let (_, _, frame, _) = synth_frame(&scaled_profile(20_000, 0.0, 8));
    let prov = provenance(frame.row_count(), "age_group=0 to 17");
    let slice = Predicate::all().and(Clause::equals("age_group", Literal::Text("0 to 17".into())));
    let table = cost_comparison(&frame, &slice, "diagnosis", (2009, 2014), Some(11), 0).unwrap();
    let mut bar = emit_bar(&table, &prov).unwrap();
    bar.metadata.generated_at = Some(1_700_000_000);
    assert_eq!(bar.series.len(), 2);
    assert!(bar.series.iter().all(|s| s.x.len() == 11 && s.y.len() == 11));
    let text = bar.to_json().unwrap();
    assert_eq!(PlotDocument::from_json(&text).unwrap(), bar);
    assert_eq!(PlotDocument::from_json(&text).unwrap().to_json().unwrap(), text);
    for (slot, series) in bar.series.iter().enumerate() {
        let cents: Vec<i64> = series.y.iter().map(|d| d.as_cents().unwrap()).collect();
        assert_eq!(cents, table.rows.iter().map(|r| r.totals[slot]).collect::<Vec<_>>());
    }

    let years: Vec<i64> = (2009..=2014).collect();
    let mood = Predicate::all().and(Clause::equals("diagnosis", Literal::Text("MOOD DISORDERS".into())));
    let series = trend_by_group(&frame, &mood, "county", TrendMetric::MeanCost, &years, 5).unwrap();
    let lines = emit_lines(&series, TrendMetric::MeanCost, &prov).unwrap();
    assert_eq!(PlotDocument::from_json(&lines.to_json().unwrap()).unwrap(), lines);
}

#[test]
fn cap_metadata_carries_exact_fraction() {
    let (_, _, frame, _) = synth_frame(&scaled_profile(20_000, 0.0, 9));
    let slice = Predicate::all().and(Clause::equals("procedure", Literal::Text("HIP REPLACEMENT,TOT/PRT".into())));
    let cap = cap_analysis(&frame, &slice, 3_000_000, 0, 250_000, 60).unwrap();
    let doc = emit_histogram(&cap, &provenance(frame.row_count(), "procedure=HIP REPLACEMENT,TOT/PRT")).unwrap();
    let parsed = PlotDocument::from_json(&doc.to_json().unwrap()).unwrap();
    let summary = &parsed.metadata.summary;
    assert_eq!(summary["fraction_below"].as_f64().unwrap().to_bits(), cap.fraction_below.value().to_bits());
    assert_eq!(summary["count_below"], Datum::int(cap.fraction_below.below as i64));
    assert_eq!(summary["mean"].as_cents(), Some(cap.mean));
    let bars: u64 = parsed.series[0].y.iter().map(|d| d.as_f64().unwrap() as u64).sum();
    assert_eq!(bars + cap.histogram.underflow + cap.histogram.overflow, cap.n);
}
