//! SELECT with dependency predicates: HOLDS (exact or within an error
//! bound), NOT HOLDS, VIOLATES, and the DEPENDENT projection.

mod distance;
mod eval;
mod parse;
mod tableau;

use std::fmt;

use crate::relation::RowPredicate;
use crate::syntax::{fmt_real, quote_ident};

pub use distance::value_distance;
pub use eval::{
    eval_dependent, eval_holds, eval_not_holds, eval_violates, execute, explain, scoped_error,
    QueryResult, DEFAULT_VIOLATES_THRESHOLD,
};
pub use parse::{parse_extended_select, parse_row_predicate};
pub(crate) use parse::{row_or, select};
pub use tableau::{
    condition_to_tableau, BoundTableau, Cond, PatternCell, PatternRow, PatternTableau,
};

#[derive(Debug, Clone, PartialEq)]
pub enum FdPredicateKind {
    Holds,
    NotHolds,
    /// Rows whose value of the suspect left-side attribute is close to, but
    /// different from, another row's in the same group.
    Violates {
        suspect: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdPredicate {
    pub kind: FdPredicateKind,
    pub lhs: Vec<String>,
    /// Exactly one attribute for HOLDS and NOT HOLDS.
    pub rhs: Vec<String>,
    pub on: Option<RowPredicate>,
    /// Error bound for HOLDS, distance threshold for VIOLATES.
    pub error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Condition {
    Fd(FdPredicate),
    Row(RowPredicate),
    And(Vec<Condition>),
    Or(Vec<Condition>),
    Not(Box<Condition>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Projection {
    Star,
    Attributes(Vec<String>),
    Dependent { on: Vec<String>, error: Option<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedSelect {
    pub projection: Projection,
    pub source: String,
    pub filter: Option<Condition>,
}

fn write_names(f: &mut fmt::Formatter<'_>, names: &[String]) -> fmt::Result {
    for (i, n) in names.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        f.write_str(&quote_ident(n))?;
    }
    Ok(())
}

impl fmt::Display for FdPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FdPredicateKind::Holds => f.write_str("HOLDS (")?,
            FdPredicateKind::NotHolds => f.write_str("NOT HOLDS (")?,
            FdPredicateKind::Violates { suspect } => {
                write!(f, "{} VIOLATES (", quote_ident(suspect))?
            }
        }
        write_names(f, &self.lhs)?;
        f.write_str(" -> ")?;
        write_names(f, &self.rhs)?;
        if let Some(on) = &self.on {
            write!(f, " ON {on}")?;
        }
        if let Some(e) = self.error {
            match self.kind {
                FdPredicateKind::Violates { .. } => write!(f, ", ERROR <= {}", fmt_real(e))?,
                _ => write!(f, ", ERROR = {}", fmt_real(e))?,
            }
        }
        f.write_str(")")
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let joined = |f: &mut fmt::Formatter<'_>, parts: &[Condition], sep: &str| {
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                match p {
                    Condition::And(_) | Condition::Or(_) => write!(f, "({p})")?,
                    Condition::Row(RowPredicate::And(v) | RowPredicate::Or(v)) if !v.is_empty() => {
                        write!(f, "({p})")?
                    }
                    _ => write!(f, "{p}")?,
                }
            }
            Ok(())
        };
        match self {
            Condition::Fd(p) => write!(f, "{p}"),
            Condition::Row(r) => write!(f, "{r}"),
            Condition::And(v) => joined(f, v, " AND "),
            Condition::Or(v) => joined(f, v, " OR "),
            Condition::Not(c) => write!(f, "NOT ({c})"),
        }
    }
}

impl fmt::Display for ExtendedSelect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SELECT ")?;
        match &self.projection {
            Projection::Star => f.write_str("*")?,
            Projection::Attributes(a) => write_names(f, a)?,
            Projection::Dependent { on, error } => {
                f.write_str("DEPENDENT ([")?;
                write_names(f, on)?;
                f.write_str("]")?;
                if let Some(e) = error {
                    write!(f, ", ERROR = {}", fmt_real(*e))?;
                }
                f.write_str(")")?;
            }
        }
        write!(f, " FROM {}", quote_ident(&self.source))?;
        if let Some(c) = &self.filter {
            write!(f, " WHERE {c}")?;
        }
        Ok(())
    }
}
