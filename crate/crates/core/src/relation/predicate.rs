use std::cmp::Ordering;
use std::fmt;

use super::{Relation, RowSet, Value};
use crate::error::{Error, Result};
use crate::syntax::{quote_ident, quote_literal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [
        CmpOp::Eq,
        CmpOp::Ne,
        CmpOp::Lt,
        CmpOp::Gt,
        CmpOp::Le,
        CmpOp::Ge,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "<>",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
        }
    }

    pub fn compare_usize(self, lhs: usize, rhs: usize) -> bool {
        self.holds(lhs.cmp(&rhs))
    }

    /// `cell op constant`; false whenever either side is null or the kinds
    /// are not comparable.
    pub fn test(self, cell: &Value, constant: &Value) -> bool {
        cell.compare(constant).is_some_and(|o| self.holds(o))
    }
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Boolean condition over a row: comparisons of an attribute with a constant,
/// joined by AND/OR/NOT. `And(vec![])` is TRUE and `Or(vec![])` is FALSE.
#[derive(Debug, Clone, PartialEq)]
pub enum RowPredicate {
    Compare {
        attr: String,
        op: CmpOp,
        value: Value,
    },
    And(Vec<RowPredicate>),
    Or(Vec<RowPredicate>),
    Not(Box<RowPredicate>),
}

impl RowPredicate {
    pub fn always() -> Self {
        RowPredicate::And(Vec::new())
    }

    pub fn never() -> Self {
        RowPredicate::Or(Vec::new())
    }

    pub fn compare(attr: impl Into<String>, op: CmpOp, value: Value) -> Self {
        RowPredicate::Compare {
            attr: attr.into(),
            op,
            value,
        }
    }

    pub fn is_always(&self) -> bool {
        matches!(self, RowPredicate::And(v) if v.is_empty())
    }

    /// Attribute names referenced anywhere in the tree.
    pub fn attributes(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_attributes(&mut out);
        out
    }

    fn collect_attributes<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            RowPredicate::Compare { attr, .. } => {
                if !out.contains(&attr.as_str()) {
                    out.push(attr);
                }
            }
            RowPredicate::And(v) | RowPredicate::Or(v) => {
                v.iter().for_each(|p| p.collect_attributes(out))
            }
            RowPredicate::Not(p) => p.collect_attributes(out),
        }
    }

    /// Resolves attribute names and checks operand kinds against `relation`.
    pub fn bind(&self, relation: &Relation) -> Result<BoundPredicate> {
        Ok(match self {
            RowPredicate::Compare { attr, op, value } => {
                let idx = relation.attr_index(attr)?;
                let kind = relation.schema()[idx].kind;
                if let Some(lit) = value.kind() {
                    if kind.is_numeric() != lit.is_numeric() {
                        return Err(Error::Type(format!(
                            "cannot compare {kind} attribute \"{attr}\" with {lit} {value}"
                        )));
                    }
                }
                BoundPredicate::Compare {
                    attr: idx,
                    op: *op,
                    value: value.clone(),
                }
            }
            RowPredicate::And(v) => {
                BoundPredicate::And(v.iter().map(|p| p.bind(relation)).collect::<Result<_>>()?)
            }
            RowPredicate::Or(v) => {
                BoundPredicate::Or(v.iter().map(|p| p.bind(relation)).collect::<Result<_>>()?)
            }
            RowPredicate::Not(p) => BoundPredicate::Not(Box::new(p.bind(relation)?)),
        })
    }
}

impl fmt::Display for RowPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowPredicate::Compare { attr, op, value } => {
                write!(f, "{} {op} {}", quote_ident(attr), quote_literal(value))
            }
            RowPredicate::And(v) if v.is_empty() => f.write_str("TRUE"),
            RowPredicate::Or(v) if v.is_empty() => f.write_str("FALSE"),
            RowPredicate::And(v) => write_joined(f, v, " AND "),
            RowPredicate::Or(v) => write_joined(f, v, " OR "),
            RowPredicate::Not(p) => match **p {
                RowPredicate::Compare { .. } => write!(f, "NOT {p}"),
                _ => write!(f, "NOT ({p})"),
            },
        }
    }
}

fn write_joined(f: &mut fmt::Formatter<'_>, parts: &[RowPredicate], sep: &str) -> fmt::Result {
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        match p {
            RowPredicate::And(v) | RowPredicate::Or(v) if !v.is_empty() => write!(f, "({p})")?,
            _ => write!(f, "{p}")?,
        }
    }
    Ok(())
}

/// A predicate with attributes resolved to column indices.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundPredicate {
    Compare {
        attr: usize,
        op: CmpOp,
        value: Value,
    },
    And(Vec<BoundPredicate>),
    Or(Vec<BoundPredicate>),
    Not(Box<BoundPredicate>),
}

impl BoundPredicate {
    pub fn matches(&self, row: &[Value]) -> bool {
        match self {
            BoundPredicate::Compare { attr, op, value } => op.test(&row[*attr], value),
            BoundPredicate::And(v) => v.iter().all(|p| p.matches(row)),
            BoundPredicate::Or(v) => v.iter().any(|p| p.matches(row)),
            BoundPredicate::Not(p) => !p.matches(row),
        }
    }
}

/// Indices of the rows of `relation` satisfying `pred`.
pub fn eval_row_predicate(relation: &Relation, pred: &RowPredicate) -> Result<RowSet> {
    let bound = pred.bind(relation)?;
    Ok(relation
        .rows()
        .iter()
        .enumerate()
        .filter(|(_, row)| bound.matches(row))
        .map(|(i, _)| i)
        .collect())
}
