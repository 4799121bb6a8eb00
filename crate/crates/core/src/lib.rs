//! Analytics over de-identified hospital discharge records.
//!
//! The pipeline runs in four stages:
//!
//! * [`ingest`] parses discharge CSV extracts into columnar [`Frame`]s, quarantining
//!   malformed rows, and reads/writes columnar snapshots.
//! * [`engine`] filters, groups, sorts, ranks, bins and summarizes frames. Money is kept in
//!   integer cents so every aggregate is exact and order independent.
//! * [`analytics`] composes the engine into the three studies: cross-year cost comparison,
//!   per-group trends with percent change, and cost-cap analysis.
//! * [`report`] turns study results into plot-ready data documents.
//!
//! [`synth`] generates seeded synthetic extracts and hosts the naive reference
//! implementations used to check the engine.

pub mod analytics;
pub mod engine;
pub mod ingest;
pub mod money;
pub mod report;
pub mod synth;

pub use engine::{Column, DataType, EngineError, Field, Frame, Predicate, Role};
pub use money::{format_money, parse_money, Cents};
