use std::{cmp::Ordering, collections::HashMap, fmt, mem::size_of, ops::Range, sync::Arc};

use serde::{Deserialize, Serialize};

use crate::money::format_money;

/// Logical type of a column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataType {
    Text,
    Integer,
    Year,
    Money,
    /// Derived real values (means of integers, standard deviations). Never produced by ingest.
    Float,
}

impl DataType {
    /// Integer-backed types that support exact aggregation.
    pub fn is_integral(self) -> bool {
        matches!(self, DataType::Integer | DataType::Year | DataType::Money)
    }

    pub fn is_numeric(self) -> bool {
        self.is_integral() || self == DataType::Float
    }

    pub fn name(self) -> &'static str {
        match self {
            DataType::Text => "text",
            DataType::Integer => "integer",
            DataType::Year => "year",
            DataType::Money => "money",
            DataType::Float => "float",
        }
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single cell, detached from its column.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Text(Arc<str>),
    Int(i64),
    Float(f64),
}

impl Value {
    pub fn is_null(&self) -> bool {
        matches!(self, Value::Null)
    }

    /// Total order used by sorting: nulls first, floats by `total_cmp`.
    pub fn total_cmp(&self, other: &Value) -> Ordering {
        use Value::*;
        match (self, other) {
            (Null, Null) => Ordering::Equal,
            (Null, _) => Ordering::Less,
            (_, Null) => Ordering::Greater,
            (Int(a), Int(b)) => a.cmp(b),
            (Float(a), Float(b)) => a.total_cmp(b),
            (Int(a), Float(b)) => (*a as f64).total_cmp(b),
            (Float(a), Int(b)) => a.total_cmp(&(*b as f64)),
            (Text(a), Text(b)) => a.cmp(b),
            (Text(_), _) => Ordering::Greater,
            (_, Text(_)) => Ordering::Less,
        }
    }
}

/// Code stored for a null text cell.
pub const NULL_CODE: u32 = u32::MAX;

/// Dictionary-encoded text column. The dictionary is shared between columns derived by
/// filtering or slicing.
#[derive(Debug, Clone)]
pub struct TextColumn {
    dict: Arc<[Arc<str>]>,
    codes: Vec<u32>,
}

impl TextColumn {
    pub fn from_values<I, S>(values: I) -> Self
    where
        I: IntoIterator<Item = Option<S>>,
        S: AsRef<str>,
    {
        let mut builder = TextColumnBuilder::default();
        for v in values {
            builder.push(v.as_ref().map(AsRef::as_ref));
        }
        builder.finish()
    }

    /// Builds a column from raw parts, checking that every code is in range.
    pub fn from_parts(dict: Vec<Arc<str>>, codes: Vec<u32>) -> Option<Self> {
        let n = dict.len();
        if codes.iter().any(|&c| c != NULL_CODE && c as usize >= n) {
            return None;
        }
        Some(TextColumn { dict: dict.into(), codes })
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn get(&self, row: usize) -> Option<&str> {
        match self.codes[row] {
            NULL_CODE => None,
            c => Some(&self.dict[c as usize]),
        }
    }

    pub fn get_arc(&self, row: usize) -> Option<&Arc<str>> {
        match self.codes[row] {
            NULL_CODE => None,
            c => Some(&self.dict[c as usize]),
        }
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn dictionary(&self) -> &[Arc<str>] {
        &self.dict
    }

    pub fn code_of(&self, value: &str) -> Option<u32> {
        self.dict.iter().position(|d| &**d == value).map(|p| p as u32)
    }

    pub fn iter(&self) -> impl Iterator<Item = Option<&str>> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    /// For each dictionary entry, its position in ascending string order.
    pub fn sort_ranks(&self) -> Vec<u32> {
        let mut order: Vec<u32> = (0..self.dict.len() as u32).collect();
        order.sort_by(|&a, &b| self.dict[a as usize].cmp(&self.dict[b as usize]));
        let mut ranks = vec![0u32; self.dict.len()];
        for (rank, code) in order.into_iter().enumerate() {
            ranks[code as usize] = rank as u32;
        }
        ranks
    }

    fn take(&self, rows: &[usize]) -> Self {
        TextColumn {
            dict: Arc::clone(&self.dict),
            codes: rows.iter().map(|&r| self.codes[r]).collect(),
        }
    }

    fn slice(&self, range: Range<usize>) -> Self {
        TextColumn {
            dict: Arc::clone(&self.dict),
            codes: self.codes[range].to_vec(),
        }
    }

    fn heap_bytes(&self) -> usize {
        let dict: usize = self
            .dict
            .iter()
            .map(|s| s.len() + 2 * size_of::<usize>() + size_of::<Arc<str>>())
            .sum();
        self.codes.len() * size_of::<u32>() + dict
    }
}

impl PartialEq for TextColumn {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().eq(other.iter())
    }
}

/// Incremental builder interning repeated labels.
#[derive(Debug, Default)]
pub struct TextColumnBuilder {
    lookup: HashMap<Arc<str>, u32>,
    dict: Vec<Arc<str>>,
    codes: Vec<u32>,
}

impl TextColumnBuilder {
    pub fn push(&mut self, value: Option<&str>) {
        let code = match value {
            None => NULL_CODE,
            Some(s) => match self.lookup.get(s) {
                Some(&c) => c,
                None => {
                    let c = self.dict.len() as u32;
                    let interned: Arc<str> = Arc::from(s);
                    self.dict.push(Arc::clone(&interned));
                    self.lookup.insert(interned, c);
                    c
                }
            },
        };
        self.codes.push(code);
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn finish(self) -> TextColumn {
        TextColumn {
            dict: self.dict.into(),
            codes: self.codes,
        }
    }
}

/// A typed, nullable column.
#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Text(TextColumn),
    Integer(Vec<Option<i64>>),
    Year(Vec<Option<i64>>),
    Money(Vec<Option<i64>>),
    Float(Vec<Option<f64>>),
}

impl Column {
    pub fn data_type(&self) -> DataType {
        match self {
            Column::Text(_) => DataType::Text,
            Column::Integer(_) => DataType::Integer,
            Column::Year(_) => DataType::Year,
            Column::Money(_) => DataType::Money,
            Column::Float(_) => DataType::Float,
        }
    }

    /// Wraps integer values in the column variant for `dtype`.
    ///
    /// Panics if `dtype` is not integral.
    pub fn integral(dtype: DataType, values: Vec<Option<i64>>) -> Self {
        match dtype {
            DataType::Integer => Column::Integer(values),
            DataType::Year => Column::Year(values),
            DataType::Money => Column::Money(values),
            other => panic!("{other} is not an integral type"),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Column::Text(t) => t.len(),
            Column::Integer(v) | Column::Year(v) | Column::Money(v) => v.len(),
            Column::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Integer-backed values, for integer, year and money columns.
    pub fn integers(&self) -> Option<&[Option<i64>]> {
        match self {
            Column::Integer(v) | Column::Year(v) | Column::Money(v) => Some(v),
            _ => None,
        }
    }

    pub fn text(&self) -> Option<&TextColumn> {
        match self {
            Column::Text(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_null(&self, row: usize) -> bool {
        match self {
            Column::Text(t) => t.codes[row] == NULL_CODE,
            Column::Integer(v) | Column::Year(v) | Column::Money(v) => v[row].is_none(),
            Column::Float(v) => v[row].is_none(),
        }
    }

    pub fn null_count(&self) -> usize {
        (0..self.len()).filter(|&r| self.is_null(r)).count()
    }

    pub fn value(&self, row: usize) -> Value {
        match self {
            Column::Text(t) => t.get_arc(row).map_or(Value::Null, |s| Value::Text(Arc::clone(s))),
            Column::Integer(v) | Column::Year(v) | Column::Money(v) => {
                v[row].map_or(Value::Null, Value::Int)
            }
            Column::Float(v) => v[row].map_or(Value::Null, Value::Float),
        }
    }

    /// Human-readable cell; money as dollars with two decimals, null as the empty string.
    pub fn display(&self, row: usize) -> String {
        match self {
            Column::Text(t) => t.get(row).unwrap_or_default().to_string(),
            Column::Money(v) => v[row].map(format_money).unwrap_or_default(),
            Column::Integer(v) | Column::Year(v) => {
                v[row].map(|x| x.to_string()).unwrap_or_default()
            }
            Column::Float(v) => v[row].map(|x| x.to_string()).unwrap_or_default(),
        }
    }

    /// Compares two rows of this column: nulls first, text by string value.
    pub fn cmp_rows(&self, a: usize, b: usize) -> Ordering {
        match self {
            Column::Text(t) => t.get(a).cmp(&t.get(b)),
            Column::Integer(v) | Column::Year(v) | Column::Money(v) => v[a].cmp(&v[b]),
            Column::Float(v) => match (v[a], v[b]) {
                (None, None) => Ordering::Equal,
                (None, Some(_)) => Ordering::Less,
                (Some(_), None) => Ordering::Greater,
                (Some(x), Some(y)) => x.total_cmp(&y),
            },
        }
    }

    pub fn take(&self, rows: &[usize]) -> Column {
        match self {
            Column::Text(t) => Column::Text(t.take(rows)),
            Column::Integer(v) => Column::Integer(rows.iter().map(|&r| v[r]).collect()),
            Column::Year(v) => Column::Year(rows.iter().map(|&r| v[r]).collect()),
            Column::Money(v) => Column::Money(rows.iter().map(|&r| v[r]).collect()),
            Column::Float(v) => Column::Float(rows.iter().map(|&r| v[r]).collect()),
        }
    }

    pub fn slice(&self, range: Range<usize>) -> Column {
        match self {
            Column::Text(t) => Column::Text(t.slice(range)),
            Column::Integer(v) => Column::Integer(v[range].to_vec()),
            Column::Year(v) => Column::Year(v[range].to_vec()),
            Column::Money(v) => Column::Money(v[range].to_vec()),
            Column::Float(v) => Column::Float(v[range].to_vec()),
        }
    }

    /// Bytes of column storage, excluding allocator slack.
    pub fn heap_bytes(&self) -> usize {
        match self {
            Column::Text(t) => t.heap_bytes(),
            Column::Integer(v) | Column::Year(v) | Column::Money(v) => {
                v.len() * size_of::<Option<i64>>()
            }
            Column::Float(v) => v.len() * size_of::<Option<f64>>(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_builder_interns_labels() {
        let col = TextColumn::from_values([Some("b"), Some("a"), None, Some("b")]);
        assert_eq!(col.dictionary().len(), 2);
        assert_eq!(col.codes(), &[0, 1, NULL_CODE, 0]);
        assert_eq!(col.get(2), None);
        assert_eq!(col.get(3), Some("b"));
        assert_eq!(col.sort_ranks(), vec![1, 0]);
    }

    #[test]
    fn text_equality_ignores_dictionary_layout() {
        let a = TextColumn::from_values([Some("x"), Some("y")]);
        let b = TextColumn::from_parts(vec![Arc::from("y"), Arc::from("x"), Arc::from("z")], vec![1, 0])
            .unwrap();
        assert_eq!(a, b);
        assert!(TextColumn::from_parts(vec![Arc::from("y")], vec![3]).is_none());
    }

    #[test]
    fn value_order_puts_nulls_first() {
        let mut vals = vec![Value::Int(3), Value::Null, Value::Int(-1)];
        vals.sort_by(Value::total_cmp);
        assert_eq!(vals, vec![Value::Null, Value::Int(-1), Value::Int(3)]);
    }

    #[test]
    fn money_displays_as_dollars() {
        let col = Column::Money(vec![Some(2_270_000), None]);
        assert_eq!(col.display(0), "22700.00");
        assert_eq!(col.display(1), "");
        assert_eq!(col.null_count(), 1);
    }
}
