use std::hint::black_box;

use boat_core::engine::{
    describe, filter, group_aggregate, group_aggregate_parallel, histogram, percentile, top_n, AggFunction,
    AggregateSpec, Clause, Literal, Predicate,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const COST: &str = "Total Costs";

fn aggs() -> Vec<AggregateSpec> {
    vec![
        AggregateSpec::count("n"),
        AggregateSpec::new(AggFunction::Sum, COST, "sum"),
        AggregateSpec::new(AggFunction::Mean, COST, "mean"),
        AggregateSpec::new(AggFunction::StdSample, COST, "std"),
    ]
}

fn grouping(c: &mut Criterion) {
    let frame = boat_bench::frame(200_000);
    let keys = ["Discharge Year", "Hospital County"];
    let mut group = c.benchmark_group("group_aggregate");
    group.bench_function("sequential", |b| b.iter(|| group_aggregate(&frame, &keys, &aggs()).unwrap()));
    for parts in [2, 4, 8] {
        group.bench_with_input(BenchmarkId::new("parallel", parts), &parts, |b, &parts| {
            b.iter(|| group_aggregate_parallel(&frame, &keys, &aggs(), parts).unwrap())
        });
    }
    group.finish();

    let by_diagnosis = group_aggregate(&frame, &["CCS Diagnosis Description"], &aggs()).unwrap();
    c.bench_function("top_n/11", |b| b.iter(|| top_n(&by_diagnosis, "sum", 11).unwrap()));

    let pred = Predicate::all().and(Clause::equals("diagnosis", Literal::Text("MOOD DISORDERS".into())));
    c.bench_function("filter/equals", |b| b.iter(|| filter(&frame, &pred).unwrap()));
}

fn statistics(c: &mut Criterion) {
    let frame = boat_bench::frame(200_000);
    let costs = frame.integers(COST).unwrap();
    c.bench_function("describe", |b| b.iter(|| describe(black_box(costs))));
    c.bench_function("histogram/60", |b| b.iter(|| histogram(black_box(costs), 0, 250_000, 60).unwrap()));
    c.bench_function("percentile/88", |b| b.iter(|| percentile(black_box(costs), 88.0).unwrap()));
}

criterion_group!(benches, grouping, statistics);
criterion_main!(benches);
