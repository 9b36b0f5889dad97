//! Pattern tableaux: a row condition in disjunctive normal form, one pattern
//! row per conjunct, with one cell per attribute of the dependency.

use std::fmt;

use crate::error::Result;
use crate::relation::{CmpOp, Relation, RowPredicate, RowSet, Value};
use crate::syntax::quote_literal;

/// `cell op value`, or its negation. Negation is kept explicit because a
/// comparison with null is false in both polarities' positive forms.
#[derive(Debug, Clone, PartialEq)]
pub struct Cond {
    pub op: CmpOp,
    pub value: Value,
    pub negate: bool,
}

impl Cond {
    pub fn new(op: CmpOp, value: Value) -> Self {
        Cond {
            op,
            value,
            negate: false,
        }
    }

    pub fn test(&self, cell: &Value) -> bool {
        self.op.test(cell, &self.value) != self.negate
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negate {
            f.write_str("NOT ")?;
        }
        write!(f, "{} {}", self.op, quote_literal(&self.value))
    }
}

/// Conjunction of conditions on one attribute; empty is the wildcard.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PatternCell {
    pub conds: Vec<Cond>,
}

impl PatternCell {
    pub fn wildcard() -> Self {
        PatternCell::default()
    }

    pub fn constant(value: Value) -> Self {
        PatternCell {
            conds: vec![Cond::new(CmpOp::Eq, value)],
        }
    }

    pub fn with(op: CmpOp, value: Value) -> Self {
        PatternCell {
            conds: vec![Cond::new(op, value)],
        }
    }

    pub fn is_wildcard(&self) -> bool {
        self.conds.is_empty()
    }

    pub fn matches(&self, cell: &Value) -> bool {
        self.conds.iter().all(|c| c.test(cell))
    }
}

impl fmt::Display for PatternCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.conds.is_empty() {
            return f.write_str("_");
        }
        for (i, c) in self.conds.iter().enumerate() {
            if i > 0 {
                f.write_str(" AND ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternRow {
    /// Aligned with the tableau's attribute list.
    pub cells: Vec<PatternCell>,
    /// Conditions on attributes outside the tableau, applied as plain
    /// filters.
    pub residual: Vec<(String, Cond)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternTableau {
    pub attributes: Vec<String>,
    pub rows: Vec<PatternRow>,
}

impl PatternTableau {
    /// One all-wildcard row: the unconditional dependency.
    pub fn unconditional(attributes: Vec<String>) -> Self {
        let cells = vec![PatternCell::wildcard(); attributes.len()];
        PatternTableau {
            attributes,
            rows: vec![PatternRow {
                cells,
                residual: Vec::new(),
            }],
        }
    }

    pub fn from_rows(attributes: Vec<String>, rows: Vec<Vec<PatternCell>>) -> Self {
        assert!(
            rows.iter().all(|r| r.len() == attributes.len()),
            "contract violation: pattern row arity differs from tableau"
        );
        PatternTableau {
            attributes,
            rows: rows
                .into_iter()
                .map(|cells| PatternRow {
                    cells,
                    residual: Vec::new(),
                })
                .collect(),
        }
    }

    pub fn bind(&self, relation: &Relation) -> Result<BoundTableau> {
        let attrs = self
            .attributes
            .iter()
            .map(|a| relation.attr_index(a))
            .collect::<Result<Vec<_>>>()?;
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut checks: Vec<(usize, PatternCell)> = attrs
                    .iter()
                    .zip(&r.cells)
                    .filter(|(_, c)| !c.is_wildcard())
                    .map(|(&a, c)| (a, c.clone()))
                    .collect();
                for (name, cond) in &r.residual {
                    checks.push((
                        relation.attr_index(name)?,
                        PatternCell {
                            conds: vec![cond.clone()],
                        },
                    ));
                }
                Ok(checks)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BoundTableau { rows })
    }

    pub fn matching_rows(&self, relation: &Relation) -> Result<RowSet> {
        let bound = self.bind(relation)?;
        Ok((0..relation.len())
            .filter(|&i| bound.matches_any(relation.row(i)))
            .collect())
    }
}

impl fmt::Display for PatternTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            f.write_str("(")?;
            for (j, (a, c)) in self.attributes.iter().zip(&row.cells).enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}: {c}")?;
            }
            f.write_str(")")?;
            for (a, c) in &row.residual {
                write!(f, " and {a} {c}")?;
            }
        }
        Ok(())
    }
}

/// Tableau resolved against a relation's column indices.
#[derive(Debug, Clone)]
pub struct BoundTableau {
    rows: Vec<Vec<(usize, PatternCell)>>,
}

impl BoundTableau {
    pub fn matches_row(&self, pattern: usize, tuple: &[Value]) -> bool {
        self.rows[pattern]
            .iter()
            .all(|(a, c)| c.matches(&tuple[*a]))
    }

    pub fn matches_any(&self, tuple: &[Value]) -> bool {
        (0..self.rows.len()).any(|p| self.matches_row(p, tuple))
    }
}

type Conjunct = Vec<(String, Cond)>;

/// Negation normal form, then distribution into conjuncts.
fn dnf(pred: &RowPredicate, negated: bool) -> Vec<Conjunct> {
    match (pred, negated) {
        (RowPredicate::Compare { attr, op, value }, neg) => vec![vec![(
            attr.clone(),
            Cond {
                op: *op,
                value: value.clone(),
                negate: neg,
            },
        )]],
        (RowPredicate::Not(p), neg) => dnf(p, !neg),
        (RowPredicate::And(v), false) | (RowPredicate::Or(v), true) => {
            let mut acc: Vec<Conjunct> = vec![Vec::new()];
            for p in v {
                let part = dnf(p, negated);
                acc = acc
                    .iter()
                    .flat_map(|a| {
                        part.iter().map(move |b| {
                            let mut c = a.clone();
                            c.extend(b.iter().cloned());
                            c
                        })
                    })
                    .collect();
            }
            acc
        }
        (RowPredicate::Or(v), false) | (RowPredicate::And(v), true) => {
            v.iter().flat_map(|p| dnf(p, negated)).collect()
        }
    }
}

/// Compiles a row condition into a tableau over `attributes` (the
/// dependency's `lhs ∪ rhs`). Atoms on other attributes become residual
/// filters of their pattern row. Operator cells stay symbolic.
pub fn condition_to_tableau(cond: &RowPredicate, attributes: &[String]) -> PatternTableau {
    let rows = dnf(cond, false)
        .into_iter()
        .map(|conj| {
            let mut cells = vec![PatternCell::wildcard(); attributes.len()];
            let mut residual = Vec::new();
            for (attr, c) in conj {
                match attributes.iter().position(|a| *a == attr) {
                    Some(i) => cells[i].conds.push(c),
                    None => residual.push((attr, c)),
                }
            }
            PatternRow { cells, residual }
        })
        .collect();
    PatternTableau {
        attributes: attributes.to_vec(),
        rows,
    }
}
