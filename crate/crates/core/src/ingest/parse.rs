use std::{collections::BTreeMap, io::Read};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ColumnSchema;
use crate::{
    engine::{Column, DataType, EngineError, Field, Frame, Role, TextColumnBuilder},
    money::{parse_money, MoneyError},
};

/// Inclusive range of accepted discharge years.
pub const YEAR_RANGE: std::ops::RangeInclusive<i64> = 1990..=2100;

/// Rows kept in [`ParseReport::first_errors`].
pub const MAX_ERROR_SAMPLES: usize = 20;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("input header is missing column(s): {}", missing.join(", "))]
    HeaderMismatch { missing: Vec<String> },
    #[error("CSV read error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// One rejected cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowError {
    pub line: u64,
    pub field: String,
    pub raw: String,
    pub reason: String,
}

/// Outcome of ingesting one stream.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseReport {
    pub rows_read: u64,
    pub rows_ok: u64,
    pub rows_quarantined: u64,
    pub errors_by_field: BTreeMap<String, u64>,
    pub first_errors: Vec<RowError>,
}

impl ParseReport {
    fn record(&mut self, line: u64, field: &str, raw: &[u8], reason: String) {
        *self.errors_by_field.entry(field.to_string()).or_default() += 1;
        if self.first_errors.len() < MAX_ERROR_SAMPLES {
            self.first_errors.push(RowError {
                line,
                field: field.to_string(),
                raw: String::from_utf8_lossy(raw).into_owned(),
                reason,
            });
        }
    }
}

enum Builder {
    Text(TextColumnBuilder),
    Integral(DataType, Vec<Option<i64>>),
}

#[derive(Clone, Copy)]
enum Staged<'a> {
    Text(Option<&'a str>),
    Int(Option<i64>),
}

struct Target {
    name: String,
    role: Option<Role>,
    data_type: DataType,
    nullable: bool,
    source: usize,
}

fn coerce<'a>(target: &Target, raw: &'a [u8]) -> Result<Staged<'a>, String> {
    let text = std::str::from_utf8(raw).map_err(|_| "invalid UTF-8".to_string())?;
    if target.data_type == DataType::Text {
        return match text.is_empty() {
            true if target.nullable => Ok(Staged::Text(None)),
            true => Err("missing value".to_string()),
            false => Ok(Staged::Text(Some(text))),
        };
    }
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return if target.nullable {
            Ok(Staged::Int(None))
        } else {
            Err("missing value".to_string())
        };
    }
    let value = match target.data_type {
        DataType::Money => parse_money(trimmed).map_err(|e| match e {
            MoneyError::Negative(_) => "negative money".to_string(),
            MoneyError::Unparseable(_) => "unparseable money".to_string(),
        })?,
        DataType::Year => {
            let y: i64 = trimmed.parse().map_err(|_| "unparseable year".to_string())?;
            if !YEAR_RANGE.contains(&y) {
                return Err(format!("year outside {}..={}", YEAR_RANGE.start(), YEAR_RANGE.end()));
            }
            y
        }
        DataType::Integer => trimmed.parse().map_err(|_| "unparseable integer".to_string())?,
        DataType::Text | DataType::Float => unreachable!(),
    };
    Ok(Staged::Int(Some(value)))
}

/// Parses a CSV stream with a header row into a frame.
///
/// Rows with any bad cell are quarantined and tallied in the report; the first
/// [`MAX_ERROR_SAMPLES`] bad cells are kept verbatim. Header columns not named by the
/// schema are carried through as nullable text. Only a missing schema column is fatal.
pub fn parse_stream<R: Read>(schema: &ColumnSchema, input: R) -> Result<(Frame, ParseReport), IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let headers = reader.byte_headers()?.clone();
    let header_names: Vec<String> = headers
        .iter()
        .map(|h| String::from_utf8_lossy(h).into_owned())
        .collect();

    let mut targets = Vec::new();
    let mut used = vec![false; header_names.len()];
    let mut missing = Vec::new();
    for spec in schema.fields() {
        let found = spec
            .header_names()
            .find_map(|name| header_names.iter().position(|h| h == name));
        match found {
            Some(source) if !used[source] => {
                used[source] = true;
                targets.push(Target {
                    name: spec.name.clone(),
                    role: spec.role,
                    data_type: spec.data_type,
                    nullable: spec.nullable,
                    source,
                });
            }
            _ => missing.push(spec.name.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(IngestError::HeaderMismatch { missing });
    }
    for (source, name) in header_names.iter().enumerate() {
        if used[source] || targets.iter().any(|t| &t.name == name) {
            continue;
        }
        targets.push(Target {
            name: name.clone(),
            role: None,
            data_type: DataType::Text,
            nullable: true,
            source,
        });
    }

    let mut builders: Vec<Builder> = targets
        .iter()
        .map(|t| match t.data_type {
            DataType::Text => Builder::Text(TextColumnBuilder::default()),
            other => Builder::Integral(other, Vec::new()),
        })
        .collect();

    let mut report = ParseReport::default();
    let mut record = csv::ByteRecord::new();
    while reader.read_byte_record(&mut record)? {
        report.rows_read += 1;
        let line = record.position().map_or(0, |p| p.line());
        let mut staged: Vec<Staged> = Vec::with_capacity(targets.len());
        let mut ok = true;
        for target in &targets {
            let raw = record.get(target.source).unwrap_or(b"");
            match coerce(target, raw) {
                Ok(v) => staged.push(v),
                Err(reason) => {
                    ok = false;
                    report.record(line, &target.name, raw, reason);
                }
            }
        }
        if !ok {
            report.rows_quarantined += 1;
            continue;
        }
        report.rows_ok += 1;
        for (builder, value) in builders.iter_mut().zip(&staged) {
            match (builder, *value) {
                (Builder::Text(b), Staged::Text(v)) => b.push(v),
                (Builder::Integral(_, b), Staged::Int(v)) => b.push(v),
                _ => unreachable!("staged value matches its builder"),
            }
        }
    }

    let fields = targets
        .into_iter()
        .zip(builders)
        .map(|(t, b)| {
            let column = match b {
                Builder::Text(b) => Column::Text(b.finish()),
                Builder::Integral(dtype, values) => Column::integral(dtype, values),
            };
            Field::new(t.name, column).with_role(t.role)
        })
        .collect();
    Ok((Frame::new(fields)?, report))
}
