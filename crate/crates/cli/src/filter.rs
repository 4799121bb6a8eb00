use boat_core::{
    engine::{Clause, Literal},
    parse_money, DataType, Frame, Predicate,
};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Equals,
    In,
    Between,
}

/// Splits a filter flag at the earliest operator.
fn split(raw: &str) -> Result<(&str, Op, &str), CliError> {
    let candidates = [("=", Op::Equals), (" in ", Op::In), (" between ", Op::Between)];
    let (pos, token, op) = candidates
        .iter()
        .filter_map(|(token, op)| raw.find(token).map(|p| (p, *token, *op)))
        .min_by_key(|(p, _, _)| *p)
        .ok_or_else(|| CliError::Usage(format!("filter `{raw}` has no `=`, ` in ` or ` between `")))?;
    let field = raw[..pos].trim();
    if field.is_empty() {
        return Err(CliError::Usage(format!("filter `{raw}` names no field")));
    }
    Ok((field, op, raw[pos + token.len()..].trim()))
}

fn literal(dtype: DataType, raw: &str) -> Result<Literal, CliError> {
    let bad = |what: &str| CliError::Usage(format!("`{raw}` is not a valid {what}"));
    match dtype {
        DataType::Text => Ok(Literal::Text(raw.to_string())),
        DataType::Money => parse_money(raw).map(Literal::Int).map_err(|_| bad("dollar amount")),
        DataType::Integer | DataType::Year => raw.parse().map(Literal::Int).map_err(|_| bad("integer")),
        DataType::Float => Err(bad("filter value for a float field")),
    }
}

fn int(dtype: DataType, raw: &str) -> Result<i64, CliError> {
    match literal(dtype, raw)? {
        Literal::Int(v) => Ok(v),
        Literal::Text(_) => Err(CliError::Usage(format!("`between` needs a numeric field, got `{raw}`"))),
    }
}

/// Parses one filter flag against the frame's field types.
pub fn parse_filter(frame: &Frame, raw: &str) -> Result<Clause, CliError> {
    let (name, op, value) = split(raw)?;
    let field = frame.resolve(name).map_err(|e| CliError::Usage(e.to_string()))?;
    let dtype = field.data_type();
    let name = field.name();
    match op {
        Op::Equals => Ok(Clause::equals(name, literal(dtype, value)?)),
        Op::In => {
            let values = value.split('|').map(|v| literal(dtype, v.trim())).collect::<Result<_, _>>()?;
            Ok(Clause::one_of(name, values))
        }
        Op::Between => {
            let (lo, hi) = value
                .split_once(',')
                .ok_or_else(|| CliError::Usage(format!("filter `{raw}` needs `between lo,hi`")))?;
            Ok(Clause::between(name, int(dtype, lo.trim())?, int(dtype, hi.trim())?))
        }
    }
}

pub fn parse_filters(frame: &Frame, raw: &[String]) -> Result<Predicate, CliError> {
    raw.iter().try_fold(Predicate::all(), |p, f| Ok(p.and(parse_filter(frame, f)?)))
}
