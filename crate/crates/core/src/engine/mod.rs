//! Immutable columnar frames and the operations the analyses are built from: filtering,
//! grouping, sorting, ranking, descriptive statistics and binning.

mod column;
mod error;
mod frame;
mod group;
mod predicate;
mod sort;
mod stats;

pub use column::{Column, DataType, TextColumn, TextColumnBuilder, Value, NULL_CODE};
pub use error::{EngineError, Result};
pub use frame::{Field, Frame, Role};
pub use group::{group_aggregate, group_aggregate_parallel, AggFunction, AggregateSpec, PartialAggregate};
pub use predicate::{filter, Clause, Condition, Literal, Predicate};
pub use sort::{sort_by, top_n, SortOrder};
pub use stats::{describe, fraction_below, histogram, percentile, Histogram, Mean, Proportion, Stats};
