//! Grouping by labels with exact, mergeable partial aggregates.
//!
//! Every accumulator is an exact integer (counts, `i128` sums and sums of squares,
//! min/max), so partial results computed over any partitioning of a frame merge into
//! the same final frame bit for bit.

use std::{collections::BTreeMap, collections::HashMap, ops::Range, sync::Arc, thread};

use serde::{Deserialize, Serialize};

use super::{
    stats::sample_std, Column, DataType, EngineError, Field, Frame, Result, Role, TextColumn,
};
use crate::money::round_ratio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggFunction {
    Sum,
    /// Rows in the group, or non-null inputs when an input field is given.
    Count,
    Mean,
    Min,
    Max,
    StdSample,
    /// Null inputs in the group.
    NullCount,
}

impl AggFunction {
    pub fn name(self) -> &'static str {
        match self {
            AggFunction::Sum => "sum",
            AggFunction::Count => "count",
            AggFunction::Mean => "mean",
            AggFunction::Min => "min",
            AggFunction::Max => "max",
            AggFunction::StdSample => "std_sample",
            AggFunction::NullCount => "null_count",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregateSpec {
    pub input: Option<String>,
    pub function: AggFunction,
    pub output: String,
}

impl AggregateSpec {
    pub fn new(function: AggFunction, input: impl Into<String>, output: impl Into<String>) -> Self {
        AggregateSpec {
            input: Some(input.into()),
            function,
            output: output.into(),
        }
    }

    pub fn count(output: impl Into<String>) -> Self {
        AggregateSpec {
            input: None,
            function: AggFunction::Count,
            output: output.into(),
        }
    }

    /// Output column type given the input column type.
    pub fn output_type(&self, input: Option<DataType>) -> DataType {
        match (self.function, input) {
            (AggFunction::Count | AggFunction::NullCount, _) => DataType::Integer,
            (AggFunction::StdSample, _) => DataType::Float,
            (AggFunction::Sum, Some(DataType::Money)) => DataType::Money,
            (AggFunction::Sum, _) => DataType::Integer,
            (AggFunction::Mean, Some(DataType::Money)) => DataType::Money,
            (AggFunction::Mean, _) => DataType::Float,
            (AggFunction::Min | AggFunction::Max, Some(t)) => t,
            (AggFunction::Min | AggFunction::Max, None) => DataType::Integer,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum KeyCell {
    Null,
    Int(i64),
    Text(Arc<str>),
}

#[derive(Debug, Clone, PartialEq)]
struct KeyMeta {
    name: String,
    role: Option<Role>,
    dtype: DataType,
}

#[derive(Debug, Clone, PartialEq)]
struct ResolvedAgg {
    spec: AggregateSpec,
    input: Option<usize>,
    input_type: Option<DataType>,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Acc {
    rows: u64,
    non_null: u64,
    sum: i128,
    sum_sq: i128,
    min: Option<i64>,
    max: Option<i64>,
}

impl Acc {
    fn push(&mut self, v: Option<i64>) -> Option<()> {
        self.rows += 1;
        if let Some(x) = v {
            self.non_null += 1;
            let x = i128::from(x);
            self.sum = self.sum.checked_add(x)?;
            self.sum_sq = self.sum_sq.checked_add(x * x)?;
            self.min = Some(self.min.map_or(x as i64, |m| m.min(x as i64)));
            self.max = Some(self.max.map_or(x as i64, |m| m.max(x as i64)));
        }
        Some(())
    }

    fn push_present(&mut self, present: bool) {
        self.rows += 1;
        self.non_null += u64::from(present);
    }

    fn merge(&mut self, other: &Acc) -> Option<()> {
        self.rows += other.rows;
        self.non_null += other.non_null;
        self.sum = self.sum.checked_add(other.sum)?;
        self.sum_sq = self.sum_sq.checked_add(other.sum_sq)?;
        self.min = match (self.min, other.min) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.max = match (self.max, other.max) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        Some(())
    }
}

/// Exact per-group accumulators for one partition of a frame.
#[derive(Debug, Clone)]
pub struct PartialAggregate {
    keys: Vec<KeyMeta>,
    aggs: Vec<ResolvedAgg>,
    groups: BTreeMap<Vec<KeyCell>, Vec<Acc>>,
}

impl PartialAggregate {
    pub fn compute(frame: &Frame, keys: &[&str], aggs: &[AggregateSpec]) -> Result<Self> {
        Self::compute_rows(frame, 0..frame.row_count(), keys, aggs)
    }

    fn compute_rows(frame: &Frame, rows: Range<usize>, keys: &[&str], aggs: &[AggregateSpec]) -> Result<Self> {
        let key_idx: Vec<usize> = keys.iter().map(|k| frame.index_of(k)).collect::<Result<_>>()?;
        let mut key_meta = Vec::with_capacity(keys.len());
        for &i in &key_idx {
            let f = &frame.fields()[i];
            if f.data_type() == DataType::Float {
                return Err(EngineError::UnsupportedKey {
                    field: f.name().to_string(),
                    dtype: DataType::Float,
                });
            }
            key_meta.push(KeyMeta {
                name: f.name().to_string(),
                role: f.role(),
                dtype: f.data_type(),
            });
        }

        let mut resolved = Vec::with_capacity(aggs.len());
        for spec in aggs {
            let input = match &spec.input {
                Some(name) => Some(frame.index_of(name)?),
                None => None,
            };
            let input_type = input.map(|i| frame.fields()[i].data_type());
            let counting = matches!(spec.function, AggFunction::Count | AggFunction::NullCount);
            match input_type {
                None if spec.function != AggFunction::Count => {
                    return Err(EngineError::MissingInput(spec.function.name()))
                }
                Some(t) if !counting && !t.is_integral() => {
                    return Err(EngineError::AggregateOnText {
                        field: spec.input.clone().unwrap_or_default(),
                        dtype: t,
                    })
                }
                _ => {}
            }
            resolved.push(ResolvedAgg {
                spec: spec.clone(),
                input,
                input_type,
            });
        }

        // Group by raw keys (dictionary codes for text) first, then materialize ordered keys.
        let key_cols: Vec<&Column> = key_idx.iter().map(|&i| frame.fields()[i].column()).collect();
        let mut slots: HashMap<Vec<Option<i64>>, usize> = HashMap::new();
        let mut raw_keys: Vec<Vec<Option<i64>>> = Vec::new();
        let mut accs: Vec<Vec<Acc>> = Vec::new();
        let mut buf: Vec<Option<i64>> = Vec::with_capacity(key_cols.len());

        for row in rows {
            buf.clear();
            for col in &key_cols {
                buf.push(raw_key(col, row));
            }
            let slot = match slots.get(buf.as_slice()) {
                Some(&s) => s,
                None => {
                    let s = accs.len();
                    slots.insert(buf.clone(), s);
                    raw_keys.push(buf.clone());
                    accs.push(vec![Acc::default(); resolved.len()]);
                    s
                }
            };
            for (acc, agg) in accs[slot].iter_mut().zip(&resolved) {
                match agg.input.map(|i| frame.fields()[i].column()) {
                    None => acc.push_present(true),
                    Some(col) => match col.integers() {
                        Some(values) => acc.push(values[row]).ok_or_else(|| {
                            EngineError::Overflow(agg.spec.input.clone().unwrap_or_default())
                        })?,
                        None => acc.push_present(!col.is_null(row)),
                    },
                }
            }
        }

        let mut groups = BTreeMap::new();
        for (raw, acc) in raw_keys.into_iter().zip(accs) {
            let key = raw
                .iter()
                .zip(&key_cols)
                .map(|(k, col)| key_cell(col, *k))
                .collect();
            groups.insert(key, acc);
        }

        Ok(PartialAggregate {
            keys: key_meta,
            aggs: resolved,
            groups,
        })
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// Folds `other` into `self`. Both partials must come from the same keys and aggregates
    /// over frames with the same schema.
    pub fn merge(&mut self, other: PartialAggregate) -> Result<()> {
        assert!(
            self.keys == other.keys && self.aggs == other.aggs,
            "merging partial aggregates with different layouts"
        );
        for (key, accs) in other.groups {
            match self.groups.get_mut(&key) {
                Some(mine) => {
                    for (a, b) in mine.iter_mut().zip(&accs) {
                        a.merge(b).ok_or_else(|| EngineError::Overflow(key_label(&key)))?;
                    }
                }
                None => {
                    self.groups.insert(key, accs);
                }
            }
        }
        Ok(())
    }

    /// Materializes one row per group, sorted ascending by key tuple.
    pub fn finish(self) -> Result<Frame> {
        let n = self.groups.len();
        let mut fields = Vec::with_capacity(self.keys.len() + self.aggs.len());

        for (k, meta) in self.keys.iter().enumerate() {
            let column = if meta.dtype == DataType::Text {
                Column::Text(TextColumn::from_values(self.groups.keys().map(|key| match &key[k] {
                    KeyCell::Text(s) => Some(s.as_ref()),
                    _ => None,
                })))
            } else {
                let values = self
                    .groups
                    .keys()
                    .map(|key| match key[k] {
                        KeyCell::Int(v) => Some(v),
                        _ => None,
                    })
                    .collect();
                Column::integral(meta.dtype, values)
            };
            fields.push(Field::new(meta.name.clone(), column).with_role(meta.role));
        }

        for (a, agg) in self.aggs.iter().enumerate() {
            let out_type = agg.spec.output_type(agg.input_type);
            let overflow = || EngineError::Overflow(agg.spec.output.clone());
            let column = match agg.spec.function {
                AggFunction::StdSample => Column::Float(
                    self.groups
                        .values()
                        .map(|accs| sample_std(accs[a].non_null, accs[a].sum, accs[a].sum_sq))
                        .collect(),
                ),
                AggFunction::Mean if out_type == DataType::Float => Column::Float(
                    self.groups
                        .values()
                        .map(|accs| {
                            let acc = &accs[a];
                            (acc.non_null > 0).then(|| acc.sum as f64 / acc.non_null as f64)
                        })
                        .collect(),
                ),
                function => {
                    let mut values = Vec::with_capacity(n);
                    for accs in self.groups.values() {
                        let acc = &accs[a];
                        let v = match function {
                            AggFunction::Count => Some(acc.non_null as i64),
                            AggFunction::NullCount => Some((acc.rows - acc.non_null) as i64),
                            AggFunction::Sum => {
                                Some(i64::try_from(acc.sum).map_err(|_| overflow())?)
                            }
                            AggFunction::Mean => match acc.non_null {
                                0 => None,
                                n => Some(
                                    i64::try_from(round_ratio(acc.sum, i128::from(n)))
                                        .map_err(|_| overflow())?,
                                ),
                            },
                            AggFunction::Min => acc.min,
                            AggFunction::Max => acc.max,
                            AggFunction::StdSample => unreachable!(),
                        };
                        values.push(v);
                    }
                    Column::integral(out_type, values)
                }
            };
            fields.push(Field::new(agg.spec.output.clone(), column));
        }

        Frame::new(fields)
    }
}

fn raw_key(col: &Column, row: usize) -> Option<i64> {
    match col {
        Column::Text(t) => match t.codes()[row] {
            super::NULL_CODE => None,
            c => Some(i64::from(c)),
        },
        Column::Integer(v) | Column::Year(v) | Column::Money(v) => v[row],
        Column::Float(_) => unreachable!("float keys are rejected"),
    }
}

fn key_cell(col: &Column, raw: Option<i64>) -> KeyCell {
    match (col, raw) {
        (_, None) => KeyCell::Null,
        (Column::Text(t), Some(c)) => KeyCell::Text(Arc::clone(&t.dictionary()[c as usize])),
        (_, Some(v)) => KeyCell::Int(v),
    }
}

fn key_label(key: &[KeyCell]) -> String {
    key.iter()
        .map(|k| match k {
            KeyCell::Null => String::new(),
            KeyCell::Int(v) => v.to_string(),
            KeyCell::Text(s) => s.to_string(),
        })
        .collect::<Vec<_>>()
        .join("/")
}

/// One output row per distinct key tuple, sorted ascending by key.
///
/// Null inputs are excluded from sum, mean, min, max and std; use
/// [`AggFunction::NullCount`] to report them.
pub fn group_aggregate(frame: &Frame, keys: &[&str], aggs: &[AggregateSpec]) -> Result<Frame> {
    PartialAggregate::compute(frame, keys, aggs)?.finish()
}

/// Same result as [`group_aggregate`], computed over `partitions` contiguous row ranges
/// on separate threads.
pub fn group_aggregate_parallel(
    frame: &Frame,
    keys: &[&str],
    aggs: &[AggregateSpec],
    partitions: usize,
) -> Result<Frame> {
    let parts = partitions.max(1);
    let (base, extra) = (frame.row_count() / parts, frame.row_count() % parts);
    let mut ranges = Vec::with_capacity(parts);
    let mut start = 0;
    for i in 0..parts {
        let end = start + base + usize::from(i < extra);
        ranges.push(start..end);
        start = end;
    }
    let partials: Vec<Result<PartialAggregate>> = thread::scope(|s| {
        let handles: Vec<_> = ranges
            .into_iter()
            .map(|r| s.spawn(move || PartialAggregate::compute_rows(frame, r, keys, aggs)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("aggregation worker panicked"))
            .collect()
    });
    let mut iter = partials.into_iter();
    let mut acc = iter.next().expect("at least one partition")?;
    for p in iter {
        acc.merge(p?)?;
    }
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labelled(labels: &[Option<&str>], costs: &[Option<i64>]) -> Frame {
        Frame::new(vec![
            Field::new("label", Column::Text(TextColumn::from_values(labels.iter().copied()))),
            Field::new("cost", Column::Money(costs.to_vec())).with_role(Some(Role::Cost)),
        ])
        .unwrap()
    }

    #[test]
    fn sums_per_label() {
        let f = labelled(&[Some("A"), Some("A"), Some("B")], &[Some(10), Some(20), Some(5)]);
        let out = group_aggregate(&f, &["label"], &[AggregateSpec::new(AggFunction::Sum, "cost", "total")]).unwrap();
        assert_eq!(out.column("label").unwrap().text().unwrap().iter().collect::<Vec<_>>(), vec![Some("A"), Some("B")]);
        assert_eq!(out.integers("total").unwrap(), &[Some(30), Some(5)]);
        assert_eq!(out.field("total").unwrap().data_type(), DataType::Money);
    }

    #[test]
    fn empty_frame_keeps_output_schema() {
        let f = labelled(&[], &[]);
        let out = group_aggregate(
            &f,
            &["label"],
            &[AggregateSpec::new(AggFunction::Mean, "cost", "mean"), AggregateSpec::count("n")],
        )
        .unwrap();
        assert_eq!(out.row_count(), 0);
        assert_eq!(out.field_names().collect::<Vec<_>>(), vec!["label", "mean", "n"]);
        assert_eq!(out.field("mean").unwrap().data_type(), DataType::Money);
        assert_eq!(out.field("n").unwrap().data_type(), DataType::Integer);
    }

    #[test]
    fn nulls_are_counted_separately() {
        let f = labelled(
            &[Some("A"), Some("A"), Some("A"), None],
            &[Some(10), None, Some(15), Some(7)],
        );
        let out = group_aggregate(
            &f,
            &["label"],
            &[
                AggregateSpec::count("rows"),
                AggregateSpec::new(AggFunction::Count, "cost", "n"),
                AggregateSpec::new(AggFunction::NullCount, "cost", "nulls"),
                AggregateSpec::new(AggFunction::Mean, "cost", "mean"),
                AggregateSpec::new(AggFunction::StdSample, "cost", "std"),
                AggregateSpec::new(AggFunction::Min, "cost", "min"),
                AggregateSpec::new(AggFunction::Max, "cost", "max"),
            ],
        )
        .unwrap();
        // Null key sorts first.
        assert_eq!(out.row(0)[0], super::super::Value::Null);
        assert_eq!(out.integers("rows").unwrap(), &[Some(1), Some(3)]);
        assert_eq!(out.integers("n").unwrap(), &[Some(1), Some(2)]);
        assert_eq!(out.integers("nulls").unwrap(), &[Some(0), Some(1)]);
        // 25 / 2 = 12.5 cents rounds half away from zero.
        assert_eq!(out.integers("mean").unwrap(), &[Some(7), Some(13)]);
        assert_eq!(out.integers("min").unwrap(), &[Some(7), Some(10)]);
        assert_eq!(out.integers("max").unwrap(), &[Some(7), Some(15)]);
        match out.column("std").unwrap() {
            Column::Float(v) => {
                assert_eq!(v[0], None);
                assert!((v[1].unwrap() - 12.5f64.sqrt()).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let f = labelled(&[Some("A")], &[Some(1)]);
        assert_eq!(
            group_aggregate(&f, &["label"], &[AggregateSpec::new(AggFunction::Sum, "label", "s")]).unwrap_err(),
            EngineError::AggregateOnText { field: "label".into(), dtype: DataType::Text }
        );
        assert_eq!(
            group_aggregate(&f, &["nope"], &[]).unwrap_err(),
            EngineError::FieldNotFound("nope".into())
        );
        let spec = AggregateSpec { input: None, function: AggFunction::Sum, output: "s".into() };
        assert_eq!(group_aggregate(&f, &["label"], &[spec]).unwrap_err(), EngineError::MissingInput("sum"));
    }

    #[test]
    fn parallel_matches_sequential() {
        let labels: Vec<Option<&str>> = (0..97).map(|i| [Some("x"), Some("y"), None][i % 3]).collect();
        let costs: Vec<Option<i64>> = (0..97).map(|i| (i % 5 != 0).then_some(i as i64 * 37)).collect();
        let f = labelled(&labels, &costs);
        let aggs = [
            AggregateSpec::new(AggFunction::Sum, "cost", "sum"),
            AggregateSpec::new(AggFunction::StdSample, "cost", "std"),
        ];
        let seq = group_aggregate(&f, &["label"], &aggs).unwrap();
        for parts in [1, 2, 3, 7, 16, 200] {
            assert_eq!(group_aggregate_parallel(&f, &["label"], &aggs, parts).unwrap(), seq);
        }
    }
}
