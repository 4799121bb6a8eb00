#![allow(dead_code)]

use boat_core::{
    engine::TextColumn,
    ingest::{parse_stream, ColumnSchema, ParseReport},
    synth::{generate_to_vec, CohortProfile, GenerationLedger},
    Column, DataType, Field, Frame,
};
use proptest::prelude::*;
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type RawRow = (Option<u8>, Option<u8>, Option<i64>, Option<i64>);

const LABELS: [&str; 6] = ["alpha", "beta", "gamma", "delta", "Zeta", ""];

/// Frame with a text key, an integer key and two money columns.
pub fn frame_from_rows(rows: &[RawRow]) -> Frame {
    let label = TextColumn::from_values(rows.iter().map(|r| r.0.map(|i| LABELS[i as usize % LABELS.len()])));
    let fields = vec![
        Field::new("label", Column::Text(label)),
        Field::new("bucket", Column::integral(DataType::Integer, rows.iter().map(|r| r.1.map(i64::from)).collect())),
        Field::new("cost", Column::integral(DataType::Money, rows.iter().map(|r| r.2).collect())),
        Field::new("extra", Column::integral(DataType::Money, rows.iter().map(|r| r.3).collect())),
    ];
    Frame::new(fields).unwrap()
}

fn nullable<T: std::fmt::Debug + Clone + 'static>(
    null_pct: u32,
    inner: impl Strategy<Value = T> + 'static,
) -> impl Strategy<Value = Option<T>> {
    prop_oneof![
        null_pct => Just(None),
        (100 - null_pct) => inner.prop_map(Some),
    ]
}

/// Random frames up to `max_rows` rows with a per-frame null rate.
pub fn arb_rows(max_rows: usize) -> impl Strategy<Value = Vec<RawRow>> {
    (0u32..60).prop_flat_map(move |null_pct| {
        let cost = prop_oneof![0i64..10_000_000, 0i64..=1_000_000_000_000_000];
        proptest::collection::vec(
            (
                nullable(null_pct, 0u8..6),
                nullable(null_pct, 0u8..4),
                nullable(null_pct, cost),
                nullable(null_pct, 0i64..5_000),
            ),
            0..=max_rows,
        )
    })
}

pub fn shuffled(frame: &Frame, seed: u64) -> Frame {
    let mut order: Vec<usize> = (0..frame.row_count()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    frame.take(&order)
}

/// Seeded lognormal-ish money sample with some nulls.
pub fn seeded_costs(n: usize, seed: u64) -> Vec<Option<i64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            if rng.random_bool(0.02) {
                None
            } else {
                let z: f64 = (0..12).map(|_| rng.random::<f64>()).sum::<f64>() - 6.0;
                Some((2_000_000.0 * (0.8 * z).exp()).round() as i64)
            }
        })
        .collect()
}

/// Scales the bundled profile's yearly counts so the total is near `rows`.
pub fn scaled_profile(rows: u64, dirty_row_rate: f64, seed: u64) -> CohortProfile {
    let mut profile = CohortProfile::bundled();
    let total = profile.total_rows() as f64;
    for s in profile.strata.iter_mut() {
        for c in s.counts.iter_mut() {
            *c = ((*c as f64) * rows as f64 / total).round() as u64;
        }
    }
    profile.dirty_row_rate = dirty_row_rate;
    profile.seed = seed;
    profile
}

pub fn synth_frame(profile: &CohortProfile) -> (Vec<u8>, GenerationLedger, Frame, ParseReport) {
    let (bytes, ledger) = generate_to_vec(profile).unwrap();
    let (frame, report) = parse_stream(&ColumnSchema::bundled(), &bytes[..]).unwrap();
    (bytes, ledger, frame, report)
}
