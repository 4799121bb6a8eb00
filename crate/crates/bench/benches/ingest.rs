use boat_core::ingest::{parse_stream, ColumnSchema};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

fn parse(c: &mut Criterion) {
    let schema = ColumnSchema::bundled();
    let mut group = c.benchmark_group("parse_stream");
    for rows in [10_000u64, 100_000] {
        let bytes = boat_bench::csv_bytes(rows);
        group.throughput(Throughput::Bytes(bytes.len() as u64));
        group.bench_with_input(BenchmarkId::from_parameter(rows), &bytes, |b, bytes| {
            b.iter(|| parse_stream(&schema, &bytes[..]).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, parse);
criterion_main!(benches);
