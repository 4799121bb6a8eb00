//! Plot-ready data documents for the three studies.
//!
//! A [`PlotDocument`] is the data behind one chart: a kind, title, axis labels, named
//! series of x/y points and provenance metadata. Money values are written in dollars with
//! exactly two decimals, converted from cents without passing through floating point.

use std::{collections::BTreeMap, fmt, str::FromStr, time::SystemTime};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::{
    analytics::{CapReport, ComparisonTable, TrendMetric, TrendSeries},
    money::{format_money, parse_money},
};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("nothing to plot: the result is empty")]
    EmptyResult,
    #[error("series {0:?} does not share the year vector of the first series")]
    InconsistentSeries(String),
    #[error("document encoding error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV encoding error: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotKind {
    GroupedBar,
    MultiLine,
    Histogram,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    pub label: String,
    pub unit: String,
}

impl Axis {
    fn new(label: impl Into<String>, unit: impl Into<String>) -> Self {
        Axis {
            label: label.into(),
            unit: unit.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axes {
    pub x: Axis,
    pub y: Axis,
}

/// One point coordinate or metadata value. Numbers keep their exact decimal text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Datum {
    Null,
    Number(serde_json::Number),
    Text(String),
}

impl Datum {
    pub fn dollars(cents: i64) -> Self {
        Datum::Number(serde_json::Number::from_str(&format_money(cents)).expect("formatted money is a JSON number"))
    }

    pub fn int(v: i64) -> Self {
        Datum::Number(v.into())
    }

    pub fn real(v: f64) -> Self {
        serde_json::Number::from_f64(v).map_or(Datum::Null, Datum::Number)
    }

    pub fn text(s: impl Into<String>) -> Self {
        Datum::Text(s.into())
    }

    /// Reads a dollar amount back as cents.
    pub fn as_cents(&self) -> Option<i64> {
        match self {
            Datum::Number(n) => parse_money(&n.to_string()).ok(),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Datum::Number(n) => n.to_string().parse().ok(),
            _ => None,
        }
    }
}

impl fmt::Display for Datum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Datum::Null => Ok(()),
            Datum::Number(n) => write!(f, "{n}"),
            Datum::Text(s) => f.write_str(s),
        }
    }
}

impl Serialize for Datum {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Datum::Null => s.serialize_unit(),
            Datum::Number(n) => n.serialize(s),
            Datum::Text(t) => s.serialize_str(t),
        }
    }
}

impl<'de> Deserialize<'de> for Datum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Null => Ok(Datum::Null),
            serde_json::Value::Number(n) => Ok(Datum::Number(n)),
            serde_json::Value::String(s) => Ok(Datum::Text(s)),
            other => Err(D::Error::custom(format!("expected number, string or null, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Series {
    pub name: String,
    pub x: Vec<Datum>,
    pub y: Vec<Datum>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metadata {
    pub source_rows: u64,
    pub filters: Vec<String>,
    /// Seconds since the Unix epoch. Excluded from document equality.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
    #[serde(default)]
    pub summary: BTreeMap<String, Datum>,
}

impl PartialEq for Metadata {
    fn eq(&self, other: &Self) -> bool {
        self.source_rows == other.source_rows && self.filters == other.filters && self.summary == other.summary
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotDocument {
    pub kind: PlotKind,
    pub title: String,
    pub axes: Axes,
    pub series: Vec<Series>,
    pub metadata: Metadata,
}

impl PlotDocument {
    pub fn to_json(&self) -> Result<String, ReportError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Flat `series,x,y` rows, one per point.
    pub fn to_csv(&self) -> Result<String, ReportError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["series", "x", "y"])?;
        for s in &self.series {
            for (x, y) in s.x.iter().zip(&s.y) {
                w.write_record([s.name.clone(), x.to_string(), y.to_string()])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }

    /// Copy without the generation timestamp, for byte-stable output.
    pub fn without_timestamp(&self) -> Self {
        let mut doc = self.clone();
        doc.metadata.generated_at = None;
        doc
    }
}

/// Where the plotted numbers came from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Provenance {
    pub source_rows: u64,
    pub filters: Vec<String>,
}

fn now() -> Option<u64> {
    SystemTime::now()
        .duration_since(SystemTime::UNIX_EPOCH)
        .ok()
        .map(|d| d.as_secs())
}

fn metadata(provenance: &Provenance, summary: BTreeMap<String, Datum>) -> Metadata {
    Metadata {
        source_rows: provenance.source_rows,
        filters: provenance.filters.clone(),
        generated_at: now(),
        summary,
    }
}

/// Grouped bars: one series per year, labels in table order, totals in dollars.
pub fn emit_bar(table: &ComparisonTable, provenance: &Provenance) -> Result<PlotDocument, ReportError> {
    if table.rows.is_empty() {
        return Err(ReportError::EmptyResult);
    }
    let (y0, y1) = table.years;
    let labels: Vec<Datum> = table.rows.iter().map(|r| Datum::text(&r.label)).collect();
    let series = [y0, y1]
        .iter()
        .enumerate()
        .map(|(i, year)| Series {
            name: year.to_string(),
            x: labels.clone(),
            y: table.rows.iter().map(|r| Datum::dollars(r.totals[i])).collect(),
        })
        .collect();
    let summary = BTreeMap::from([
        ("group_field".to_string(), Datum::text(&table.group_field)),
        ("ranking_year".to_string(), Datum::int(table.ranking_year)),
    ]);
    Ok(PlotDocument {
        kind: PlotKind::GroupedBar,
        title: format!("Total costs by {}, {y0} and {y1}", table.group_field),
        axes: Axes {
            x: Axis::new(&table.group_field, "label"),
            y: Axis::new("Total costs", "USD"),
        },
        series,
        metadata: metadata(provenance, summary),
    })
}

/// One line per group over the shared year vector.
pub fn emit_lines(
    series: &[TrendSeries],
    metric: TrendMetric,
    provenance: &Provenance,
) -> Result<PlotDocument, ReportError> {
    let first = series.first().ok_or(ReportError::EmptyResult)?;
    if let Some(bad) = series.iter().find(|s| s.years != first.years || s.values.len() != s.years.len()) {
        return Err(ReportError::InconsistentSeries(bad.group_label.clone()));
    }
    let (y_label, y_unit) = match metric {
        TrendMetric::Count => ("Cases", "count"),
        TrendMetric::SumCost => ("Total costs", "USD"),
        TrendMetric::MeanCost => ("Mean cost per case", "USD"),
    };
    let value = |v: Option<i64>| match (v, metric.is_money()) {
        (None, _) => Datum::Null,
        (Some(v), true) => Datum::dollars(v),
        (Some(v), false) => Datum::int(v),
    };
    let lines = series
        .iter()
        .map(|s| Series {
            name: s.group_label.clone(),
            x: s.years.iter().map(|&y| Datum::int(y)).collect(),
            y: s.values.iter().map(|&v| value(v)).collect(),
        })
        .collect();
    let summary = series
        .iter()
        .map(|s| {
            (
                format!("pct_change:{}", s.group_label),
                s.pct_change_endpoints.map_or(Datum::Null, Datum::real),
            )
        })
        .collect();
    let (start, end) = (first.years[0], first.years[first.years.len() - 1]);
    Ok(PlotDocument {
        kind: PlotKind::MultiLine,
        title: format!("{y_label} by group, {start}-{end}"),
        axes: Axes {
            x: Axis::new("Year", "year"),
            y: Axis::new(y_label, y_unit),
        },
        series: lines,
        metadata: metadata(provenance, summary),
    })
}

/// Histogram bars at each bin's left edge; summary statistics ride in the metadata.
pub fn emit_histogram(report: &CapReport, provenance: &Provenance) -> Result<PlotDocument, ReportError> {
    let h = &report.histogram;
    let series = vec![Series {
        name: "count".to_string(),
        x: (0..h.counts.len()).map(|i| Datum::dollars(h.left_edge(i))).collect(),
        y: h.counts.iter().map(|&c| Datum::int(c as i64)).collect(),
    }];
    let summary = BTreeMap::from([
        ("n".to_string(), Datum::int(report.n as i64)),
        ("mean".to_string(), Datum::dollars(report.mean)),
        ("std_sample".to_string(), report.std_sample.map_or(Datum::Null, Datum::dollars)),
        ("median".to_string(), Datum::dollars(report.median)),
        ("threshold".to_string(), Datum::dollars(report.threshold)),
        ("fraction_below".to_string(), Datum::real(report.fraction_below.value())),
        ("count_below".to_string(), Datum::int(report.fraction_below.below as i64)),
        ("bin_width".to_string(), Datum::dollars(h.bin_width)),
        ("underflow".to_string(), Datum::int(h.underflow as i64)),
        ("overflow".to_string(), Datum::int(h.overflow as i64)),
    ]);
    Ok(PlotDocument {
        kind: PlotKind::Histogram,
        title: "Cost distribution".to_string(),
        axes: Axes {
            x: Axis::new("Cost (bin left edge)", "USD"),
            y: Axis::new("Patients", "count"),
        },
        series,
        metadata: metadata(provenance, summary),
    })
}
