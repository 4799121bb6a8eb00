use std::fmt;

use super::{Column, EngineError, Frame, Result};

/// A literal compared against a column. Money literals are in cents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Literal {
    Text(String),
    Int(i64),
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Text(s) => f.write_str(s),
            Literal::Int(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    Equals(Literal),
    OneOf(Vec<Literal>),
    /// Inclusive on both ends; numeric fields only.
    Between(i64, i64),
}

impl Condition {
    fn op_name(&self) -> &'static str {
        match self {
            Condition::Equals(_) => "equals",
            Condition::OneOf(_) => "one_of",
            Condition::Between(..) => "between",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    /// Field name or role name.
    pub field: String,
    pub condition: Condition,
}

impl Clause {
    pub fn equals(field: impl Into<String>, value: Literal) -> Self {
        Clause {
            field: field.into(),
            condition: Condition::Equals(value),
        }
    }

    pub fn one_of(field: impl Into<String>, values: Vec<Literal>) -> Self {
        Clause {
            field: field.into(),
            condition: Condition::OneOf(values),
        }
    }

    pub fn between(field: impl Into<String>, lo: i64, hi: i64) -> Self {
        Clause {
            field: field.into(),
            condition: Condition::Between(lo, hi),
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.condition {
            Condition::Equals(v) => write!(f, "{}={}", self.field, v),
            Condition::OneOf(vs) => {
                write!(f, "{} in ", self.field)?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
            Condition::Between(lo, hi) => write!(f, "{} between {lo},{hi}", self.field),
        }
    }
}

/// Conjunction of clauses. The empty predicate matches every row.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Predicate {
    clauses: Vec<Clause>,
}

impl Predicate {
    pub fn all() -> Self {
        Predicate::default()
    }

    pub fn new(clauses: Vec<Clause>) -> Self {
        Predicate { clauses }
    }

    pub fn and(mut self, clause: Clause) -> Self {
        self.clauses.push(clause);
        self
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return f.write_str("(all rows)");
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" AND ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Row mask for a single clause.
fn clause_mask(frame: &Frame, clause: &Clause) -> Result<Vec<bool>> {
    let field = frame.resolve(&clause.field)?;
    let type_err = || EngineError::PredicateType {
        field: field.name().to_string(),
        dtype: field.data_type(),
        op: clause.condition.op_name(),
    };

    let literals: &[Literal] = match &clause.condition {
        Condition::Equals(v) => std::slice::from_ref(v),
        Condition::OneOf(vs) => vs,
        Condition::Between(lo, hi) => {
            let values = field.column().integers().ok_or_else(type_err)?;
            return Ok(values
                .iter()
                .map(|v| v.is_some_and(|x| *lo <= x && x <= *hi))
                .collect());
        }
    };

    match field.column() {
        Column::Text(t) => {
            let mut wanted = vec![false; t.dictionary().len()];
            for lit in literals {
                let Literal::Text(s) = lit else {
                    return Err(type_err());
                };
                if let Some(code) = t.code_of(s) {
                    wanted[code as usize] = true;
                }
            }
            Ok(t.codes()
                .iter()
                .map(|&c| wanted.get(c as usize).copied().unwrap_or(false))
                .collect())
        }
        Column::Integer(values) | Column::Year(values) | Column::Money(values) => {
            let mut wanted = Vec::with_capacity(literals.len());
            for lit in literals {
                let Literal::Int(v) = lit else {
                    return Err(type_err());
                };
                wanted.push(*v);
            }
            Ok(values
                .iter()
                .map(|v| v.is_some_and(|x| wanted.contains(&x)))
                .collect())
        }
        Column::Float(_) => Err(type_err()),
    }
}

/// Rows satisfying every clause, in their original order.
pub fn filter(frame: &Frame, predicate: &Predicate) -> Result<Frame> {
    if predicate.is_empty() {
        return Ok(frame.clone());
    }
    let mut mask = vec![true; frame.row_count()];
    for clause in predicate.clauses() {
        for (m, keep) in mask.iter_mut().zip(clause_mask(frame, clause)?) {
            *m &= keep;
        }
    }
    let rows: Vec<usize> = mask
        .iter()
        .enumerate()
        .filter_map(|(i, &m)| m.then_some(i))
        .collect();
    Ok(frame.take(&rows))
}
