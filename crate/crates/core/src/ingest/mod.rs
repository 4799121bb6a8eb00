//! Reading discharge extracts: schema binding, CSV parsing with quarantine, and
//! columnar snapshots.

mod parse;
mod schema;
pub mod snapshot;

pub use crate::money::{format_money, parse_money, MoneyError};
pub use parse::{parse_stream, IngestError, ParseReport, RowError, MAX_ERROR_SAMPLES, YEAR_RANGE};
pub use schema::{load_schema, ColumnSchema, FieldSpec, SchemaError};
pub use snapshot::{is_snapshot, read_snapshot, write_snapshot, SnapshotError};
