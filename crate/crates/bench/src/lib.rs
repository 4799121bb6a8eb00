//! Fixtures shared by the benchmarks.

use boat_core::{
    ingest::{parse_stream, ColumnSchema},
    synth::{generate_to_vec, CohortProfile},
    Frame,
};

/// Bundled profile with yearly counts scaled to roughly `rows` in total.
pub fn profile(rows: u64) -> CohortProfile {
    let mut profile = CohortProfile::bundled();
    let factor = rows as f64 / profile.total_rows() as f64;
    for stratum in profile.strata.iter_mut() {
        for count in stratum.counts.iter_mut() {
            *count = (*count as f64 * factor).round() as u64;
        }
    }
    profile
}

pub fn csv_bytes(rows: u64) -> Vec<u8> {
    generate_to_vec(&profile(rows)).expect("bundled profile is valid").0
}

pub fn frame(rows: u64) -> Frame {
    parse_stream(&ColumnSchema::bundled(), &csv_bytes(rows)[..]).expect("generated CSV parses").0
}
