use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{Column, DataType, EngineError, Frame, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortOrder {
    Asc,
    Desc,
}

/// Stable sort on one field. Nulls sort first ascending and last descending.
pub fn sort_by(frame: &Frame, key: &str, order: SortOrder) -> Result<Frame> {
    let col = frame.column(key)?;
    let mut rows: Vec<usize> = (0..frame.row_count()).collect();
    match order {
        SortOrder::Asc => rows.sort_by(|&a, &b| col.cmp_rows(a, b)),
        SortOrder::Desc => rows.sort_by(|&a, &b| col.cmp_rows(b, a)),
    }
    Ok(frame.take(&rows))
}

/// The `n` rows with the largest `value_field`, descending.
///
/// Ties are broken ascending by the first text column, then by the remaining columns in
/// frame order, so the result does not depend on input row order.
pub fn top_n(frame: &Frame, value_field: &str, n: usize) -> Result<Frame> {
    let value_idx = frame.index_of(value_field)?;
    let value_col = frame.fields()[value_idx].column();
    if !value_col.data_type().is_numeric() {
        return Err(EngineError::AggregateOnText {
            field: value_field.to_string(),
            dtype: value_col.data_type(),
        });
    }

    let first_text = frame
        .fields()
        .iter()
        .position(|f| f.data_type() == DataType::Text);
    let mut tiebreak: Vec<&Column> = Vec::new();
    if let Some(t) = first_text {
        tiebreak.push(frame.fields()[t].column());
    }
    tiebreak.extend(
        frame
            .fields()
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != first_text && *i != value_idx)
            .map(|(_, f)| f.column()),
    );

    let mut rows: Vec<usize> = (0..frame.row_count()).collect();
    rows.sort_by(|&a, &b| {
        value_col.cmp_rows(b, a).then_with(|| {
            tiebreak
                .iter()
                .map(|c| c.cmp_rows(a, b))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
    });
    rows.truncate(n);
    Ok(frame.take(&rows))
}
