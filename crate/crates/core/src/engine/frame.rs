use std::{collections::HashSet, fmt, ops::Range, str::FromStr, sync::Arc};

use serde::{Deserialize, Serialize};

use super::{Column, DataType, EngineError, Result, Value};

/// Semantic role a column plays in the discharge analyses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Year,
    County,
    Facility,
    AgeGroup,
    Diagnosis,
    Procedure,
    Cost,
}

impl Role {
    pub const ALL: [Role; 7] = [
        Role::Year,
        Role::County,
        Role::Facility,
        Role::AgeGroup,
        Role::Diagnosis,
        Role::Procedure,
        Role::Cost,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Role::Year => "year",
            Role::County => "county",
            Role::Facility => "facility",
            Role::AgeGroup => "age_group",
            Role::Diagnosis => "diagnosis",
            Role::Procedure => "procedure",
            Role::Cost => "cost",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Role::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown role {s:?}"))
    }
}

/// A named column with an optional role tag.
#[derive(Debug, Clone)]
pub struct Field {
    name: String,
    role: Option<Role>,
    column: Arc<Column>,
}

impl Field {
    pub fn new(name: impl Into<String>, column: Column) -> Self {
        Field {
            name: name.into(),
            role: None,
            column: Arc::new(column),
        }
    }

    pub fn with_role(mut self, role: Option<Role>) -> Self {
        self.role = role;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn role(&self) -> Option<Role> {
        self.role
    }

    pub fn column(&self) -> &Column {
        &self.column
    }

    pub fn data_type(&self) -> DataType {
        self.column.data_type()
    }

    fn derive(&self, column: Column) -> Field {
        Field {
            name: self.name.clone(),
            role: self.role,
            column: Arc::new(column),
        }
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.role == other.role && self.column == other.column
    }
}

/// Immutable columnar table. Every operation returns a new frame; column storage is shared
/// where it is not modified.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    fields: Vec<Field>,
    row_count: usize,
}

impl Frame {
    pub fn new(fields: Vec<Field>) -> Result<Self> {
        let row_count = fields.first().map_or(0, |f| f.column.len());
        let mut seen = HashSet::new();
        for f in &fields {
            if !seen.insert(f.name.as_str()) {
                return Err(EngineError::DuplicateField(f.name.clone()));
            }
            if f.column.len() != row_count {
                return Err(EngineError::LengthMismatch {
                    field: f.name.clone(),
                    expected: row_count,
                    found: f.column.len(),
                });
            }
        }
        Ok(Frame { fields, row_count })
    }

    pub fn empty() -> Self {
        Frame {
            fields: Vec::new(),
            row_count: 0,
        }
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn is_empty(&self) -> bool {
        self.row_count == 0
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn field_names(&self) -> impl Iterator<Item = &str> {
        self.fields.iter().map(|f| f.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.fields
            .iter()
            .position(|f| f.name == name)
            .ok_or_else(|| EngineError::FieldNotFound(name.to_string()))
    }

    pub fn field(&self, name: &str) -> Result<&Field> {
        self.index_of(name).map(|i| &self.fields[i])
    }

    pub fn column(&self, name: &str) -> Result<&Column> {
        self.field(name).map(Field::column)
    }

    pub fn role_field(&self, role: Role) -> Result<&Field> {
        self.fields
            .iter()
            .find(|f| f.role == Some(role))
            .ok_or(EngineError::MissingRole(role))
    }

    /// Resolves either a role name (`"county"`) or an exact field name.
    pub fn resolve(&self, name_or_role: &str) -> Result<&Field> {
        if let Ok(f) = self.field(name_or_role) {
            return Ok(f);
        }
        match name_or_role.parse::<Role>() {
            Ok(role) => self
                .role_field(role)
                .map_err(|_| EngineError::FieldNotFound(name_or_role.to_string())),
            Err(_) => Err(EngineError::FieldNotFound(name_or_role.to_string())),
        }
    }

    /// Integer-backed values of a numeric field.
    pub fn integers(&self, name: &str) -> Result<&[Option<i64>]> {
        let field = self.field(name)?;
        field.column.integers().ok_or_else(|| EngineError::AggregateOnText {
            field: name.to_string(),
            dtype: field.data_type(),
        })
    }

    pub fn value(&self, row: usize, field: usize) -> Value {
        self.fields[field].column.value(row)
    }

    pub fn row(&self, row: usize) -> Vec<Value> {
        self.fields.iter().map(|f| f.column.value(row)).collect()
    }

    /// Rows at the given indices, in the given order.
    pub fn take(&self, rows: &[usize]) -> Frame {
        Frame {
            fields: self.fields.iter().map(|f| f.derive(f.column.take(rows))).collect(),
            row_count: rows.len(),
        }
    }

    pub fn slice(&self, range: Range<usize>) -> Frame {
        let len = range.len();
        Frame {
            fields: self
                .fields
                .iter()
                .map(|f| f.derive(f.column.slice(range.clone())))
                .collect(),
            row_count: len,
        }
    }

    /// Splits into `parts` contiguous, nearly equal partitions (some may be empty).
    pub fn partition(&self, parts: usize) -> Vec<Frame> {
        let parts = parts.max(1);
        let base = self.row_count / parts;
        let extra = self.row_count % parts;
        let mut start = 0;
        (0..parts)
            .map(|i| {
                let len = base + usize::from(i < extra);
                let p = self.slice(start..start + len);
                start += len;
                p
            })
            .collect()
    }

    /// Bytes of column storage held by this frame.
    pub fn heap_bytes(&self) -> usize {
        self.fields.iter().map(|f| f.column.heap_bytes()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Frame {
        Frame::new(vec![
            Field::new("label", Column::Text(super::super::TextColumn::from_values([Some("a"), Some("b"), None])))
                .with_role(Some(Role::Diagnosis)),
            Field::new("cost", Column::Money(vec![Some(10), None, Some(30)])).with_role(Some(Role::Cost)),
        ])
        .unwrap()
    }

    #[test]
    fn rejects_ragged_and_duplicate_columns() {
        let err = Frame::new(vec![
            Field::new("a", Column::Integer(vec![Some(1)])),
            Field::new("b", Column::Integer(vec![])),
        ])
        .unwrap_err();
        assert!(matches!(err, EngineError::LengthMismatch { .. }));
        let err = Frame::new(vec![
            Field::new("a", Column::Integer(vec![])),
            Field::new("a", Column::Integer(vec![])),
        ])
        .unwrap_err();
        assert_eq!(err, EngineError::DuplicateField("a".into()));
    }

    #[test]
    fn resolves_roles_and_names() {
        let f = sample();
        assert_eq!(f.resolve("diagnosis").unwrap().name(), "label");
        assert_eq!(f.resolve("cost").unwrap().name(), "cost");
        assert!(matches!(f.resolve("county"), Err(EngineError::FieldNotFound(_))));
        assert!(matches!(f.integers("label"), Err(EngineError::AggregateOnText { .. })));
    }

    #[test]
    fn partitions_cover_all_rows() {
        let f = sample();
        let parts = f.partition(2);
        assert_eq!(parts.iter().map(Frame::row_count).collect::<Vec<_>>(), vec![2, 1]);
        let parts = f.partition(7);
        assert_eq!(parts.iter().map(Frame::row_count).sum::<usize>(), 3);
        assert_eq!(parts[1].row(0), f.row(1));
    }
}
