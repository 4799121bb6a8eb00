use std::{collections::BTreeMap, io::Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use super::{CohortProfile, SynthError};
use crate::money::format_money;

/// Header of generated files, matching the bundled ingest schema.
pub const HEADER: [&str; 7] = [
    "Hospital County",
    "Facility Name",
    "Age Group",
    "Discharge Year",
    "CCS Diagnosis Description",
    "CCS Procedure Description",
    "Total Costs",
];

/// Generated costs are clamped to this many cents ($1B).
pub const MAX_GENERATED_CENTS: i64 = 100_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corruption {
    NonNumericCost,
    BlankYear,
    NegativeCost,
}

const CORRUPTIONS: [Corruption; 3] = [Corruption::NonNumericCost, Corruption::BlankYear, Corruption::NegativeCost];

/// Valid rows emitted for one stratum in one year.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerCell {
    pub stratum: usize,
    pub year: i64,
    pub valid_rows: u64,
    pub cost_cents: i64,
}

/// What a generator run wrote.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationLedger {
    pub rows_emitted: u64,
    pub valid_rows: u64,
    pub corrupted: u64,
    pub corrupted_by_mode: BTreeMap<Corruption, u64>,
    pub cells: Vec<LedgerCell>,
}

/// Writes a CSV extract for `profile` and returns the exact tally of what was written.
///
/// Output is a pure function of the profile (including its seed). Rows are emitted year by
/// year, stratum by stratum. A corrupted row replaces the valid row it would have been and
/// is excluded from the ledger cells.
pub fn generate<W: Write>(profile: &CohortProfile, out: W) -> Result<GenerationLedger, SynthError> {
    profile.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(HEADER)?;

    let mut ledger = GenerationLedger::default();
    for (y, &year) in profile.years.iter().enumerate() {
        let year_text = year.to_string();
        for (s, stratum) in profile.strata.iter().enumerate() {
            let dist = LogNormal::new(stratum.log_mean, stratum.log_sigma)
                .map_err(|e| SynthError::InvalidProfile(format!("stratum {s}: {e}")))?;
            let mut cell = LedgerCell {
                stratum: s,
                year,
                valid_rows: 0,
                cost_cents: 0,
            };
            for _ in 0..stratum.counts[y] {
                let cost = (dist.sample(&mut rng).round() as i64).clamp(0, MAX_GENERATED_CENTS);
                let corruption = (profile.dirty_row_rate > 0.0 && rng.random::<f64>() < profile.dirty_row_rate)
                    .then(|| CORRUPTIONS[rng.random_range(0..CORRUPTIONS.len())]);

                let (year_field, cost_field) = match corruption {
                    None => (year_text.clone(), format_money(cost)),
                    Some(Corruption::NonNumericCost) => (year_text.clone(), "N/A".to_string()),
                    Some(Corruption::BlankYear) => (String::new(), format_money(cost)),
                    Some(Corruption::NegativeCost) => (year_text.clone(), format!("-{}", format_money(cost.max(1)))),
                };
                writer.write_record([
                    stratum.county.as_str(),
                    &stratum.facility,
                    &stratum.age_group,
                    &year_field,
                    &stratum.diagnosis,
                    &stratum.procedure,
                    &cost_field,
                ])?;

                ledger.rows_emitted += 1;
                match corruption {
                    None => {
                        ledger.valid_rows += 1;
                        cell.valid_rows += 1;
                        cell.cost_cents += cost;
                    }
                    Some(mode) => {
                        ledger.corrupted += 1;
                        *ledger.corrupted_by_mode.entry(mode).or_default() += 1;
                    }
                }
            }
            ledger.cells.push(cell);
        }
    }
    writer.flush()?;
    Ok(ledger)
}

/// [`generate`] into memory.
pub fn generate_to_vec(profile: &CohortProfile) -> Result<(Vec<u8>, GenerationLedger), SynthError> {
    let mut buf = Vec::new();
    let ledger = generate(profile, &mut buf)?;
    Ok((buf, ledger))
}
