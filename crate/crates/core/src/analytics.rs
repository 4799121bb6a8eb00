//! The three discharge studies, composed from engine primitives:
//!
//! * [`cost_comparison`]: total cost per label for two years, ranked by the later year.
//! * [`trend_by_group`]: a per-group metric over a year range with endpoint percent change.
//! * [`cap_analysis`]: cost distribution of a cohort against a reimbursement threshold.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{
    describe, filter, fraction_below, group_aggregate, histogram, AggFunction,
    AggregateSpec, Clause, EngineError, Frame, Histogram, Literal, Mean, Predicate, Proportion,
    Role,
};

/// Label used for a null group key.
pub const MISSING_LABEL: &str = "(missing)";

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("percent change is undefined for baseline {0}")]
    UndefinedBaseline(i64),
    #[error("no rows with a cost value match {predicate}")]
    EmptyCohort { predicate: String },
    #[error("invalid year selection: {0}")]
    InvalidYears(String),
}

pub type Result<T, E = AnalyticsError> = std::result::Result<T, E>;

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `100·(new − base)/base`.
///
/// The ratio is reduced to lowest terms before the single floating point division, so
/// scaling both arguments by the same factor gives a bit-identical result.
pub fn percent_change(base: i64, new: i64) -> Result<f64> {
    if base <= 0 {
        return Err(AnalyticsError::UndefinedBaseline(base));
    }
    let num = 100 * (i128::from(new) - i128::from(base));
    let den = i128::from(base);
    let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i128;
    Ok((num / g) as f64 / (den / g) as f64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    /// Total cost in cents for `years.0` and `years.1`.
    pub totals: [i64; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub group_field: String,
    pub years: (i64, i64),
    pub ranking_year: i64,
    /// Descending by the ranking-year total, ties ascending by label.
    pub rows: Vec<ComparisonRow>,
}

fn year_and_cost(frame: &Frame) -> Result<(String, String)> {
    Ok((
        frame.role_field(Role::Year)?.name().to_string(),
        frame.role_field(Role::Cost)?.name().to_string(),
    ))
}

fn label_of(frame: &Frame, field: &str, row: usize) -> Result<String> {
    let col = frame.column(field)?;
    Ok(if col.is_null(row) {
        MISSING_LABEL.to_string()
    } else {
        col.display(row)
    })
}

/// Total cost per `group_field` label in each of two years, within `slice`.
///
/// Rows are ranked by the later year's total; the first `skip_top` labels are dropped and
/// at most `top` are kept (`None` keeps all).
pub fn cost_comparison(
    frame: &Frame,
    slice: &Predicate,
    group_field: &str,
    years: (i64, i64),
    top: Option<usize>,
    skip_top: usize,
) -> Result<ComparisonTable> {
    let (y0, y1) = years;
    if y0 >= y1 {
        return Err(AnalyticsError::InvalidYears(format!("{y0} must precede {y1}")));
    }
    let (year_field, cost_field) = year_and_cost(frame)?;
    let group = frame.resolve(group_field)?.name().to_string();

    let sliced = filter(
        frame,
        &slice
            .clone()
            .and(Clause::one_of(&year_field, vec![Literal::Int(y0), Literal::Int(y1)])),
    )?;
    let grouped = group_aggregate(
        &sliced,
        &[&group, &year_field],
        &[AggregateSpec::new(AggFunction::Sum, &cost_field, "total")],
    )?;

    let group_years = grouped.integers(&year_field)?;
    let totals = grouped.integers("total")?;
    let mut by_label: BTreeMap<String, [i64; 2]> = BTreeMap::new();
    for row in 0..grouped.row_count() {
        let slot = usize::from(group_years[row] == Some(y1));
        by_label.entry(label_of(&grouped, &group, row)?).or_default()[slot] += totals[row].unwrap_or(0);
    }

    let mut rows: Vec<ComparisonRow> = by_label
        .into_iter()
        .map(|(label, totals)| ComparisonRow { label, totals })
        .collect();
    rows.sort_by(|a, b| b.totals[1].cmp(&a.totals[1]).then_with(|| a.label.cmp(&b.label)));
    let rows = rows
        .into_iter()
        .skip(skip_top)
        .take(top.unwrap_or(usize::MAX))
        .collect();

    Ok(ComparisonTable {
        group_field: group,
        years,
        ranking_year: y1,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendMetric {
    /// Discharge records per group-year.
    Count,
    /// Total cost in cents.
    SumCost,
    /// Cost per case in cents.
    MeanCost,
}

impl TrendMetric {
    pub fn is_money(self) -> bool {
        !matches!(self, TrendMetric::Count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSeries {
    pub group_label: String,
    pub years: Vec<i64>,
    /// Absent only for a mean over a group-year with no cases.
    pub values: Vec<Option<i64>>,
    /// Percent change from the first to the last year; absent when the first value is
    /// not positive or the last is absent.
    pub pct_change_endpoints: Option<f64>,
}

fn validate_years(years: &[i64]) -> Result<()> {
    if years.len() < 2 {
        return Err(AnalyticsError::InvalidYears("at least two years are required".into()));
    }
    if years.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AnalyticsError::InvalidYears("years must be strictly ascending".into()));
    }
    Ok(())
}

/// Per-group metric for each of `years` within `slice`, for the `top_k` groups with the
/// largest final-year value (ties ascending by label).
///
/// Missing group-years are 0 for count and sum, absent for mean.
pub fn trend_by_group(
    frame: &Frame,
    slice: &Predicate,
    group_field: &str,
    metric: TrendMetric,
    years: &[i64],
    top_k: usize,
) -> Result<Vec<TrendSeries>> {
    validate_years(years)?;
    let (year_field, cost_field) = year_and_cost(frame)?;
    let group = frame.resolve(group_field)?.name().to_string();

    let sliced = filter(
        frame,
        &slice
            .clone()
            .and(Clause::one_of(&year_field, years.iter().map(|&y| Literal::Int(y)).collect())),
    )?;
    let value_spec = match metric {
        TrendMetric::Count => AggregateSpec::count("value"),
        TrendMetric::SumCost => AggregateSpec::new(AggFunction::Sum, &cost_field, "value"),
        TrendMetric::MeanCost => AggregateSpec::new(AggFunction::Mean, &cost_field, "value"),
    };
    let grouped = group_aggregate(&sliced, &[&group, &year_field], &[value_spec])?;

    let group_years = grouped.integers(&year_field)?;
    let values = grouped.integers("value")?;
    let empty_cell = match metric {
        TrendMetric::MeanCost => None,
        _ => Some(0),
    };
    let mut cells: BTreeMap<String, Vec<Option<i64>>> = BTreeMap::new();
    for row in 0..grouped.row_count() {
        let label = label_of(&grouped, &group, row)?;
        let Some(pos) = group_years[row].and_then(|y| years.iter().position(|&x| x == y)) else {
            continue;
        };
        cells.entry(label).or_insert_with(|| vec![empty_cell; years.len()])[pos] = values[row];
    }

    let mut ranked: Vec<(String, Vec<Option<i64>>)> = cells.into_iter().collect();
    ranked.sort_by(|a, b| {
        let (la, lb) = (a.1.last().copied().flatten(), b.1.last().copied().flatten());
        lb.cmp(&la).then_with(|| a.0.cmp(&b.0))
    });
    ranked.truncate(top_k);

    Ok(ranked
        .into_iter()
        .map(|(label, values)| {
            let pct = match (values[0], values[values.len() - 1]) {
                (Some(first), Some(last)) if first > 0 => percent_change(first, last).ok(),
                _ => None,
            };
            TrendSeries {
                group_label: label,
                years: years.to_vec(),
                values,
                pct_change_endpoints: pct,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapReport {
    pub n: u64,
    /// Exact mean cost, and the same rounded to the cent.
    pub mean_exact: Mean,
    pub mean: i64,
    /// Sample standard deviation rounded to the cent; absent for a single-row cohort.
    pub std_sample: Option<i64>,
    pub median: i64,
    pub threshold: i64,
    pub fraction_below: Proportion,
    pub histogram: Histogram,
}

/// Distribution of the cost column over `slice` against `threshold` (all money in cents).
pub fn cap_analysis(
    frame: &Frame,
    slice: &Predicate,
    threshold: i64,
    hist_lo: i64,
    hist_width: i64,
    hist_bins: usize,
) -> Result<CapReport> {
    let cost_field = frame.role_field(Role::Cost)?.name().to_string();
    let sliced = filter(frame, slice)?;
    let costs = sliced.integers(&cost_field)?;
    let hist = histogram(costs, hist_lo, hist_width, hist_bins)?;
    let stats = describe(costs);
    let (Some(mean_exact), Some(median)) = (stats.mean, stats.median) else {
        return Err(AnalyticsError::EmptyCohort {
            predicate: slice.to_string(),
        });
    };
    let fraction = fraction_below(costs, threshold)?;
    Ok(CapReport {
        n: stats.n,
        mean_exact,
        mean: mean_exact.rounded(),
        std_sample: stats.std_sample.map(|s| s.round() as i64),
        median,
        threshold,
        fraction_below: fraction,
        histogram: hist,
    })
}
