#![allow(dead_code)]

use std::{
    fs,
    path::{Path, PathBuf},
};

use boat_core::{
    analytics::TrendMetric,
    report::{emit_bar, emit_histogram, emit_lines, PlotDocument, Provenance},
    synth::oracle::{naive_cap, naive_cost_comparison, naive_trend, read_records, OracleRecord},
};

pub const HIP: &str = "HIP REPLACEMENT,TOT/PRT";

pub struct GoldenCase {
    pub name: &'static str,
    pub args: Vec<&'static str>,
    pub filters: Vec<String>,
}

impl GoldenCase {
    pub fn argv(&self, input: &Path, out: &Path) -> Vec<String> {
        let mut argv = vec!["boat".to_string(), self.args[0].to_string()];
        argv.extend(["--input".into(), input.display().to_string(), "--out".into(), out.display().to_string()]);
        for f in &self.filters {
            argv.extend(["--filter".to_string(), f.clone()]);
        }
        argv.extend(self.args[1..].iter().map(|a| a.to_string()));
        argv
    }

    pub fn golden_path(&self) -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{}.json", self.name))
    }
}

/// The three chart runs on the bundled profile.
pub fn cases() -> Vec<GoldenCase> {
    vec![
        GoldenCase {
            name: "top_costs",
            args: vec!["top-costs", "--group", "diagnosis", "--years", "2009,2014", "--top", "11", "--skip-top", "0"],
            filters: vec!["age_group=0 to 17".into()],
        },
        GoldenCase {
            name: "trend",
            args: vec!["trend", "--group", "county", "--metric", "count", "--years", "2009:2014", "--top", "5"],
            filters: vec!["diagnosis=MOOD DISORDERS".into()],
        },
        GoldenCase {
            name: "cap",
            args: vec!["cap", "--threshold", "30000"],
            filters: vec![format!("procedure={HIP}"), "year=2014".into()],
        },
    ]
}

fn provenance(records: &[OracleRecord], case: &GoldenCase) -> Provenance {
    Provenance {
        source_rows: records.len() as u64,
        filters: case.filters.clone(),
    }
}

/// Expected documents computed by the naive oracle from the generated CSV bytes.
pub fn oracle_documents(csv: &[u8]) -> Vec<(GoldenCase, PlotDocument)> {
    let records = read_records(csv);
    cases()
        .into_iter()
        .map(|case| {
            let prov = provenance(&records, &case);
            let doc = match case.name {
                "top_costs" => {
                    let table = naive_cost_comparison(
                        &records,
                        |r| r.age_group == "0 to 17",
                        |r| r.diagnosis.clone(),
                        "CCS Diagnosis Description",
                        (2009, 2014),
                        Some(11),
                        0,
                    );
                    emit_bar(&table, &prov).unwrap()
                }
                "trend" => {
                    let years: Vec<i64> = (2009..=2014).collect();
                    let series = naive_trend(
                        &records,
                        |r| r.diagnosis == "MOOD DISORDERS",
                        |r| r.county.clone(),
                        TrendMetric::Count,
                        &years,
                        5,
                    );
                    emit_lines(&series, TrendMetric::Count, &prov).unwrap()
                }
                "cap" => {
                    let report = naive_cap(&records, |r| r.procedure == HIP && r.year == 2014, 3_000_000, 0, 250_000, 60).unwrap();
                    emit_histogram(&report, &prov).unwrap()
                }
                other => unreachable!("{other}"),
            };
            (case, doc.without_timestamp())
        })
        .collect()
}

/// Runs `boat synth` with the bundled profile and returns the CSV path.
pub fn synth_csv(dir: &Path) -> PathBuf {
    let out = dir.join("synth");
    let code = boat_cli::run(["boat", "synth", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    out.join("discharges.csv")
}

pub fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
