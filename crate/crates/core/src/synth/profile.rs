use std::{fs, path::Path};

use serde::{Deserialize, Serialize};

use super::SynthError;
use crate::ingest::YEAR_RANGE;

const BUNDLED_PROFILE: &str = include_str!("../../assets/discharge_profile.toml");

/// Upper bound on the share of deliberately corrupted rows.
pub const MAX_DIRTY_ROW_RATE: f64 = 0.2;

/// One homogeneous block of discharges: fixed labels, per-year case counts and a
/// lognormal cost distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stratum {
    pub county: String,
    pub facility: String,
    pub age_group: String,
    pub diagnosis: String,
    pub procedure: String,
    /// Cases per year, aligned with [`CohortProfile::years`].
    pub counts: Vec<u64>,
    /// Mean of the log of the cost in cents.
    pub log_mean: f64,
    /// Standard deviation of the log of the cost in cents.
    pub log_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CohortProfile {
    pub years: Vec<i64>,
    pub seed: u64,
    #[serde(default)]
    pub dirty_row_rate: f64,
    #[serde(default, rename = "stratum")]
    pub strata: Vec<Stratum>,
}

impl CohortProfile {
    /// The bundled profile shaped after the statewide extracts: pediatric cost leaders,
    /// growing adolescent mood-disorder caseloads and a right-skewed hip replacement cohort.
    pub fn bundled() -> Self {
        Self::from_toml(BUNDLED_PROFILE).expect("bundled profile is valid")
    }

    pub fn from_toml(text: &str) -> Result<Self, SynthError> {
        let profile: CohortProfile = toml::from_str(text).map_err(|e| SynthError::Syntax {
            line: e.span().map_or(1, |s| text[..s.start.min(text.len())].matches('\n').count() + 1),
            message: e.message().to_string(),
        })?;
        profile.validate()?;
        Ok(profile)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, SynthError> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("profile serializes")
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let invalid = |msg: String| Err(SynthError::InvalidProfile(msg));
        if self.years.is_empty() {
            return invalid("at least one year is required".into());
        }
        if let Some(y) = self.years.iter().find(|y| !YEAR_RANGE.contains(y)) {
            return invalid(format!("year {y} outside {}..={}", YEAR_RANGE.start(), YEAR_RANGE.end()));
        }
        if !(0.0..=MAX_DIRTY_ROW_RATE).contains(&self.dirty_row_rate) {
            return invalid(format!(
                "dirty_row_rate {} outside [0, {MAX_DIRTY_ROW_RATE}]",
                self.dirty_row_rate
            ));
        }
        for (i, s) in self.strata.iter().enumerate() {
            if s.counts.len() != self.years.len() {
                return invalid(format!(
                    "stratum {i} has {} yearly counts for {} years",
                    s.counts.len(),
                    self.years.len()
                ));
            }
            if !(s.log_sigma.is_finite() && s.log_sigma > 0.0) {
                return invalid(format!("stratum {i} log_sigma must be positive"));
            }
            if !s.log_mean.is_finite() {
                return invalid(format!("stratum {i} log_mean must be finite"));
            }
        }
        Ok(())
    }

    pub fn total_rows(&self) -> u64 {
        self.strata.iter().flat_map(|s| &s.counts).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_profile_is_valid() {
        let p = CohortProfile::bundled();
        assert_eq!(p.years, (2009..=2014).collect::<Vec<_>>());
        assert_eq!(p.dirty_row_rate, 0.0);
        assert!(p.total_rows() > 10_000);
        assert!(p.strata.iter().any(|s| s.diagnosis == "LIVEBORN"));
        assert!(p.strata.iter().any(|s| s.diagnosis == "MOOD DISORDERS" && s.age_group == "0 to 17"));
        assert_eq!(CohortProfile::from_toml(&p.to_toml()).unwrap(), p);
    }

    fn one_stratum(counts: &str, sigma: f64, rate: f64) -> String {
        format!(
            "years = [2014]\nseed = 1\ndirty_row_rate = {rate}\n[[stratum]]\ncounty = \"A\"\nfacility = \"F\"\nage_group = \"0 to 17\"\ndiagnosis = \"D\"\nprocedure = \"P\"\ncounts = {counts}\nlog_mean = 9.0\nlog_sigma = {sigma}\n"
        )
    }

    #[test]
    fn rejects_invalid_profiles() {
        assert!(CohortProfile::from_toml(&one_stratum("[3]", 0.5, 0.0)).is_ok());
        for bad in [
            one_stratum("[3, 4]", 0.5, 0.0),
            one_stratum("[3]", 0.0, 0.0),
            one_stratum("[3]", -1.0, 0.0),
            one_stratum("[3]", 0.5, 0.25),
            one_stratum("[3]", 0.5, -0.1),
        ] {
            assert!(matches!(CohortProfile::from_toml(&bad), Err(SynthError::InvalidProfile(_))), "{bad}");
        }
        assert!(matches!(
            CohortProfile::from_toml(&one_stratum("[-3]", 0.5, 0.0)),
            Err(SynthError::Syntax { line: 10, .. })
        ));
    }
}
