//! Naive reference implementations.
//!
//! Everything here is written from the operation definitions with plain loops over rows
//! and shares no grouping, ranking, binning or statistics code with [`crate::engine`] or
//! [`crate::analytics`]. The only engine items used are plain data types and the frame's
//! cell accessor.

use std::cmp::Ordering;

use crate::{
    analytics::{CapReport, ComparisonRow, ComparisonTable, TrendMetric, TrendSeries},
    engine::{AggFunction, AggregateSpec, DataType, EngineError, Frame, Histogram, Mean, Proportion, Value},
};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Null,
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn int(&self) -> Option<i64> {
        match self {
            Cell::Int(v) => Some(*v),
            _ => None,
        }
    }
}

/// Nulls first; numbers numerically; text by bytes.
pub fn cell_cmp(a: &Cell, b: &Cell) -> Ordering {
    match (a, b) {
        (Cell::Null, Cell::Null) => Ordering::Equal,
        (Cell::Null, _) => Ordering::Less,
        (_, Cell::Null) => Ordering::Greater,
        (Cell::Int(x), Cell::Int(y)) => x.cmp(y),
        (Cell::Float(x), Cell::Float(y)) => x.total_cmp(y),
        (Cell::Text(x), Cell::Text(y)) => x.cmp(y),
        (Cell::Int(x), Cell::Float(y)) => (*x as f64).total_cmp(y),
        (Cell::Float(x), Cell::Int(y)) => x.total_cmp(&(*y as f64)),
        (Cell::Text(_), _) => Ordering::Greater,
        (_, Cell::Text(_)) => Ordering::Less,
    }
}

/// Row-oriented table.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTable {
    pub columns: Vec<String>,
    pub types: Vec<DataType>,
    pub rows: Vec<Vec<Cell>>,
}

impl OracleTable {
    pub fn from_frame(frame: &Frame) -> Self {
        let columns = frame.field_names().map(String::from).collect();
        let types = frame.fields().iter().map(|f| f.data_type()).collect();
        let rows = (0..frame.row_count())
            .map(|r| {
                (0..frame.fields().len())
                    .map(|c| match frame.value(r, c) {
                        Value::Null => Cell::Null,
                        Value::Int(v) => Cell::Int(v),
                        Value::Float(v) => Cell::Float(v),
                        Value::Text(s) => Cell::Text(s.to_string()),
                    })
                    .collect()
            })
            .collect();
        OracleTable { columns, types, rows }
    }

    pub fn index(&self, name: &str) -> Result<usize, EngineError> {
        for (i, c) in self.columns.iter().enumerate() {
            if c == name {
                return Ok(i);
            }
        }
        Err(EngineError::FieldNotFound(name.to_string()))
    }

    pub fn values(&self, name: &str) -> Result<Vec<Option<i64>>, EngineError> {
        let i = self.index(name)?;
        Ok(self.rows.iter().map(|r| r[i].int()).collect())
    }
}

/// Integer nearest to `num / den`, halves away from zero, by truncating division and fixup.
fn rounded_div(num: i128, den: i128) -> i128 {
    let q = num / den;
    let r = num % den;
    if 2 * r.abs() >= den {
        q + num.signum()
    } else {
        q
    }
}

fn two_pass_std(values: &[i64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
    let ss: f64 = values.iter().map(|&v| (v as f64 - mean) * (v as f64 - mean)).sum();
    Some((ss / (n - 1.0)).sqrt())
}

/// Nested-loop grouping: each row is matched against the list of groups seen so far.
pub fn naive_group_aggregate(
    table: &OracleTable,
    keys: &[&str],
    aggs: &[AggregateSpec],
) -> Result<OracleTable, EngineError> {
    let mut key_idx = Vec::new();
    for k in keys {
        key_idx.push(table.index(k)?);
    }
    let mut input_idx = Vec::new();
    for a in aggs {
        let idx = match &a.input {
            Some(name) => Some(table.index(name)?),
            None if a.function == AggFunction::Count => None,
            None => return Err(EngineError::MissingInput(a.function.name())),
        };
        if let Some(i) = idx {
            let t = table.types[i];
            let counting = matches!(a.function, AggFunction::Count | AggFunction::NullCount);
            if !counting && !matches!(t, DataType::Integer | DataType::Year | DataType::Money) {
                return Err(EngineError::AggregateOnText { field: table.columns[i].clone(), dtype: t });
            }
        }
        input_idx.push(idx);
    }

    let mut groups: Vec<(Vec<Cell>, Vec<usize>)> = Vec::new();
    for (r, row) in table.rows.iter().enumerate() {
        let key: Vec<Cell> = key_idx.iter().map(|&i| row[i].clone()).collect();
        let mut found = false;
        for g in groups.iter_mut() {
            if g.0 == key {
                g.1.push(r);
                found = true;
                break;
            }
        }
        if !found {
            groups.push((key, vec![r]));
        }
    }
    groups.sort_by(|a, b| {
        for (x, y) in a.0.iter().zip(&b.0) {
            let o = cell_cmp(x, y);
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    });

    let mut columns: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
    let mut types: Vec<DataType> = key_idx.iter().map(|&i| table.types[i]).collect();
    for (a, idx) in aggs.iter().zip(&input_idx) {
        columns.push(a.output.clone());
        types.push(a.output_type(idx.map(|i| table.types[i])));
    }

    let mut rows = Vec::new();
    for (key, members) in groups {
        let mut row = key;
        for (a, idx) in aggs.iter().zip(&input_idx) {
            let input_type = idx.map(|i| table.types[i]);
            let cells: Vec<&Cell> = match idx {
                Some(i) => members.iter().map(|&r| &table.rows[r][*i]).collect(),
                None => members.iter().map(|_| &Cell::Int(1)).collect(),
            };
            let present: Vec<i64> = cells.iter().filter_map(|c| c.int()).collect();
            let non_null = cells.iter().filter(|c| !matches!(c, Cell::Null)).count() as i64;
            let sum: i128 = present.iter().map(|&v| v as i128).sum();
            let cell = match a.function {
                AggFunction::Count => Cell::Int(non_null),
                AggFunction::NullCount => Cell::Int(cells.len() as i64 - non_null),
                AggFunction::Sum => Cell::Int(sum as i64),
                AggFunction::Mean if present.is_empty() => Cell::Null,
                AggFunction::Mean if input_type == Some(DataType::Money) => {
                    Cell::Int(rounded_div(sum, present.len() as i128) as i64)
                }
                AggFunction::Mean => Cell::Float(sum as f64 / present.len() as f64),
                AggFunction::Min => present.iter().min().map_or(Cell::Null, |&v| Cell::Int(v)),
                AggFunction::Max => present.iter().max().map_or(Cell::Null, |&v| Cell::Int(v)),
                AggFunction::StdSample => two_pass_std(&present).map_or(Cell::Null, Cell::Float),
            };
            row.push(cell);
        }
        rows.push(row);
    }
    Ok(OracleTable { columns, types, rows })
}

/// Repeatedly picks the best remaining row: largest value, then ascending first text
/// column, then ascending remaining columns.
pub fn naive_top_n(table: &OracleTable, value: &str, n: usize) -> Result<OracleTable, EngineError> {
    let v = table.index(value)?;
    if table.types[v] == DataType::Text {
        return Err(EngineError::AggregateOnText { field: value.to_string(), dtype: DataType::Text });
    }
    let text = table.types.iter().position(|t| *t == DataType::Text);
    let mut order: Vec<usize> = Vec::new();
    if let Some(t) = text {
        order.push(t);
    }
    for i in 0..table.columns.len() {
        if Some(i) != text && i != v {
            order.push(i);
        }
    }
    let better = |a: &[Cell], b: &[Cell]| -> bool {
        match cell_cmp(&a[v], &b[v]) {
            Ordering::Greater => return true,
            Ordering::Less => return false,
            Ordering::Equal => {}
        }
        for &i in &order {
            match cell_cmp(&a[i], &b[i]) {
                Ordering::Less => return true,
                Ordering::Greater => return false,
                Ordering::Equal => {}
            }
        }
        false
    };
    let mut remaining: Vec<Vec<Cell>> = table.rows.clone();
    let mut rows = Vec::new();
    while rows.len() < n && !remaining.is_empty() {
        let mut best = 0;
        for i in 1..remaining.len() {
            if better(&remaining[i], &remaining[best]) {
                best = i;
            }
        }
        rows.push(remaining.remove(best));
    }
    Ok(OracleTable { columns: table.columns.clone(), types: table.types.clone(), rows })
}

/// Stable insertion sort of integer cells, nulls first.
pub fn naive_sort(values: &[Option<i64>], descending: bool) -> Vec<Option<i64>> {
    let mut out: Vec<Option<i64>> = Vec::with_capacity(values.len());
    for &v in values {
        let pos = if descending {
            out.partition_point(|&x| x >= v)
        } else {
            out.partition_point(|&x| x <= v)
        };
        out.insert(pos, v);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveStats {
    pub n: u64,
    pub sum: i128,
    pub mean: f64,
    pub std_sample: Option<f64>,
    pub min: i64,
    pub max: i64,
    pub median: i64,
}

/// Two-pass summary; `None` for an all-null column.
pub fn naive_describe(values: &[Option<i64>]) -> Option<NaiveStats> {
    let mut present: Vec<i64> = values.iter().filter_map(|v| *v).collect();
    if present.is_empty() {
        return None;
    }
    present.sort();
    let n = present.len();
    let sum: i128 = present.iter().map(|&v| v as i128).sum();
    Some(NaiveStats {
        n: n as u64,
        sum,
        mean: sum as f64 / n as f64,
        std_sample: two_pass_std(&present),
        min: present[0],
        max: present[n - 1],
        median: present[n.div_ceil(2) - 1],
    })
}

/// Assigns each value by testing every bin in turn.
pub fn naive_histogram(values: &[Option<i64>], lo: i64, width: i64, bins: usize) -> (Vec<u64>, u64, u64) {
    let mut counts = vec![0u64; bins];
    let (mut under, mut over) = (0, 0);
    for v in values.iter().filter_map(|v| *v) {
        let v = v as i128;
        if v < lo as i128 {
            under += 1;
            continue;
        }
        let mut placed = false;
        for (i, c) in counts.iter_mut().enumerate() {
            let left = lo as i128 + i as i128 * width as i128;
            if left <= v && v < left + width as i128 {
                *c += 1;
                placed = true;
                break;
            }
        }
        if !placed {
            over += 1;
        }
    }
    (counts, under, over)
}

/// `(count strictly below, non-null count)`.
pub fn naive_fraction_below(values: &[Option<i64>], threshold: i64) -> (u64, u64) {
    let mut below = 0;
    let mut total = 0;
    for v in values.iter().filter_map(|v| *v) {
        total += 1;
        if v < threshold {
            below += 1;
        }
    }
    (below, total)
}

/// Sort a copy and index at the nearest rank.
pub fn naive_percentile(values: &[Option<i64>], p: f64) -> Option<i64> {
    let mut present: Vec<i64> = values.iter().filter_map(|v| *v).collect();
    if present.is_empty() {
        return None;
    }
    present.sort();
    let mut rank = (p * present.len() as f64 / 100.0).ceil() as usize;
    if rank == 0 {
        rank = 1;
    }
    Some(present[rank.min(present.len()) - 1])
}

/// One valid discharge row, read straight from CSV text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleRecord {
    pub county: String,
    pub facility: String,
    pub age_group: String,
    pub year: i64,
    pub diagnosis: String,
    pub procedure: String,
    pub cost: i64,
}

fn plain_cents(raw: &str) -> Option<i64> {
    let (whole, frac) = raw.split_once('.').unwrap_or((raw, ""));
    if whole.is_empty() || frac.len() > 2 || !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let frac_cents = match frac.len() {
        0 => 0,
        1 => frac.parse::<i64>().ok()? * 10,
        _ => frac.parse::<i64>().ok()?,
    };
    Some(whole.parse::<i64>().ok()? * 100 + frac_cents)
}

/// Reads generator output (header in generator column order), skipping rows whose year
/// or cost does not parse.
pub fn read_records(csv_bytes: &[u8]) -> Vec<OracleRecord> {
    let mut reader = csv::Reader::from_reader(csv_bytes);
    let mut out = Vec::new();
    for rec in reader.records() {
        let Ok(rec) = rec else { continue };
        let year: Option<i64> = rec.get(3).and_then(|y| y.parse().ok());
        let cost = rec.get(6).and_then(plain_cents);
        if let (Some(year), Some(cost)) = (year, cost) {
            out.push(OracleRecord {
                county: rec[0].to_string(),
                facility: rec[1].to_string(),
                age_group: rec[2].to_string(),
                year,
                diagnosis: rec[4].to_string(),
                procedure: rec[5].to_string(),
                cost,
            });
        }
    }
    out
}

/// Filter, total per label and year, sort, skip and take.
pub fn naive_cost_comparison(
    records: &[OracleRecord],
    keep: impl Fn(&OracleRecord) -> bool,
    label: impl Fn(&OracleRecord) -> String,
    group_field: &str,
    years: (i64, i64),
    top: Option<usize>,
    skip_top: usize,
) -> ComparisonTable {
    let mut rows: Vec<ComparisonRow> = Vec::new();
    for r in records.iter().filter(|r| keep(r)) {
        let slot = if r.year == years.0 {
            0
        } else if r.year == years.1 {
            1
        } else {
            continue;
        };
        let l = label(r);
        match rows.iter_mut().find(|row| row.label == l) {
            Some(row) => row.totals[slot] += r.cost,
            None => {
                let mut totals = [0, 0];
                totals[slot] = r.cost;
                rows.push(ComparisonRow { label: l, totals });
            }
        }
    }
    rows.sort_by(|a, b| b.totals[1].cmp(&a.totals[1]).then(a.label.cmp(&b.label)));
    let rows = rows.into_iter().skip(skip_top).take(top.unwrap_or(usize::MAX)).collect();
    ComparisonTable { group_field: group_field.to_string(), years, ranking_year: years.1, rows }
}

/// Per-cell scan for every (label, year), then rank by the final year.
pub fn naive_trend(
    records: &[OracleRecord],
    keep: impl Fn(&OracleRecord) -> bool,
    label: impl Fn(&OracleRecord) -> String,
    metric: TrendMetric,
    years: &[i64],
    top_k: usize,
) -> Vec<TrendSeries> {
    let kept: Vec<&OracleRecord> = records.iter().filter(|r| keep(r) && years.contains(&r.year)).collect();
    let mut labels: Vec<String> = Vec::new();
    for r in &kept {
        let l = label(r);
        if !labels.contains(&l) {
            labels.push(l);
        }
    }
    let mut series: Vec<TrendSeries> = labels
        .into_iter()
        .map(|l| {
            let values: Vec<Option<i64>> = years
                .iter()
                .map(|&y| {
                    let costs: Vec<i64> = kept.iter().filter(|r| r.year == y && label(r) == l).map(|r| r.cost).collect();
                    let total: i64 = costs.iter().sum();
                    match metric {
                        TrendMetric::Count => Some(costs.len() as i64),
                        TrendMetric::SumCost => Some(total),
                        TrendMetric::MeanCost if costs.is_empty() => None,
                        TrendMetric::MeanCost => Some(rounded_div(total as i128, costs.len() as i128) as i64),
                    }
                })
                .collect();
            let pct = match (values[0], values[values.len() - 1]) {
                (Some(a), Some(b)) if a > 0 => Some((100 * (b - a)) as f64 / a as f64),
                _ => None,
            };
            TrendSeries { group_label: l, years: years.to_vec(), values, pct_change_endpoints: pct }
        })
        .collect();
    series.sort_by(|a, b| {
        let (x, y) = (a.values[a.values.len() - 1], b.values[b.values.len() - 1]);
        y.cmp(&x).then(a.group_label.cmp(&b.group_label))
    });
    series.truncate(top_k);
    series
}

/// Cohort summary from sorted costs and per-bin scans; `None` for an empty cohort.
pub fn naive_cap(
    records: &[OracleRecord],
    keep: impl Fn(&OracleRecord) -> bool,
    threshold: i64,
    lo: i64,
    width: i64,
    bins: usize,
) -> Option<CapReport> {
    let costs: Vec<Option<i64>> = records.iter().filter(|r| keep(r)).map(|r| Some(r.cost)).collect();
    let stats = naive_describe(&costs)?;
    let (counts, underflow, overflow) = naive_histogram(&costs, lo, width, bins);
    let (below, total) = naive_fraction_below(&costs, threshold);
    Some(CapReport {
        n: stats.n,
        mean_exact: Mean { numerator: stats.sum, denominator: stats.n },
        mean: rounded_div(stats.sum, stats.n as i128) as i64,
        std_sample: stats.std_sample.map(|s| s.round() as i64),
        median: stats.median,
        threshold,
        fraction_below: Proportion { below, total },
        histogram: Histogram { lo, bin_width: width, counts, underflow, overflow },
    })
}
