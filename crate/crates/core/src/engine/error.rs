use thiserror::Error;

use super::{DataType, Role};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("field not found: {0:?}")]
    FieldNotFound(String),
    #[error("duplicate field name: {0:?}")]
    DuplicateField(String),
    #[error("column {field:?} has {found} rows, expected {expected}")]
    LengthMismatch {
        field: String,
        expected: usize,
        found: usize,
    },
    #[error("predicate {op} cannot be applied to {dtype} field {field:?}")]
    PredicateType {
        field: String,
        dtype: DataType,
        op: &'static str,
    },
    #[error("cannot aggregate {dtype} field {field:?}; a numeric field is required")]
    AggregateOnText { field: String, dtype: DataType },
    #[error("aggregate {0} requires an input field")]
    MissingInput(&'static str),
    #[error("cannot group by {dtype} field {field:?}")]
    UnsupportedKey { field: String, dtype: DataType },
    #[error("no field carries the {0} role")]
    MissingRole(Role),
    #[error("bin width must be positive, got {0}")]
    NonPositiveBinWidth(i64),
    #[error("histogram needs at least one bin")]
    InvalidBinCount,
    #[error("column has no non-null values")]
    EmptyColumn,
    #[error("percentile must lie in [0, 100], got {0}")]
    InvalidPercentile(f64),
    #[error("integer overflow while aggregating {0:?}")]
    Overflow(String),
}

pub type Result<T, E = EngineError> = std::result::Result<T, E>;
