//! SELECTDEP: querying an FD set by left/right-side patterns, left-side
//! length and error.

use std::fmt;

use super::subset::{parse_lhs_construct, parse_subset, AttrNames, LhsConstruct, SubsetExpr};
use super::{FdEntry, FdSet};
use crate::error::{Error, Result};
use crate::relation::CmpOp;
use crate::syntax::{fmt_real, quote_ident, Cursor, Sym};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdmlProjection {
    /// `*` (or nothing): every column, including error and origin.
    Star,
    /// `LHS -> RHS`
    LhsRhs,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FdmlCondition {
    LhsLike(LhsConstruct),
    RhsLike(SubsetExpr),
    LhsLength(CmpOp, usize),
    ErrorLeq(f64),
    And(Vec<FdmlCondition>),
    Or(Vec<FdmlCondition>),
}

impl FdmlCondition {
    /// Largest number of `ERROR` atoms on any single conjunctive path.
    fn error_atoms(&self) -> usize {
        match self {
            FdmlCondition::ErrorLeq(_) => 1,
            FdmlCondition::And(v) => v.iter().map(Self::error_atoms).sum(),
            FdmlCondition::Or(v) => v.iter().map(Self::error_atoms).max().unwrap_or(0),
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdmlQuery {
    pub projection: FdmlProjection,
    pub source: String,
    pub filter: Option<FdmlCondition>,
}

pub fn parse_fdml(src: &str) -> Result<FdmlQuery> {
    let mut cur = Cursor::new(src)?;
    let q = parse_query(&mut cur)?;
    cur.expect_end()?;
    Ok(q)
}

fn parse_query(cur: &mut Cursor) -> Result<FdmlQuery> {
    cur.expect_kw("SELECTDEP")?;
    let projection = if cur.eat_sym(Sym::Star) {
        FdmlProjection::Star
    } else if cur.eat_kw("LHS") {
        cur.expect_sym(Sym::Arrow)?;
        cur.expect_kw("RHS")?;
        FdmlProjection::LhsRhs
    } else {
        FdmlProjection::Star
    };
    cur.expect_kw("FROM")?;
    let source = cur.name()?;
    let filter = if cur.eat_kw("WHERE") {
        Some(parse_or(cur)?)
    } else {
        None
    };
    Ok(FdmlQuery {
        projection,
        source,
        filter,
    })
}

fn parse_or(cur: &mut Cursor) -> Result<FdmlCondition> {
    let mut parts = vec![parse_and(cur)?];
    while cur.eat_kw("OR") {
        parts.push(parse_and(cur)?);
    }
    Ok(if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        FdmlCondition::Or(parts)
    })
}

fn parse_and(cur: &mut Cursor) -> Result<FdmlCondition> {
    let mut parts = Vec::new();
    let mut errors = 0;
    loop {
        let pos = cur.pos();
        let factor = parse_factor(cur)?;
        errors += factor.error_atoms();
        if errors > 1 {
            return Err(Error::syntax(
                pos,
                "at most one ERROR condition per conjunction",
            ));
        }
        parts.push(factor);
        if !cur.eat_kw("AND") {
            break;
        }
    }
    Ok(if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        FdmlCondition::And(parts)
    })
}

fn parse_factor(cur: &mut Cursor) -> Result<FdmlCondition> {
    if cur.eat_sym(Sym::LParen) {
        let inner = parse_or(cur)?;
        cur.expect_sym(Sym::RParen)?;
        return Ok(inner);
    }
    if cur.eat_kw("LHS") {
        if cur.eat_kw("LIKE") {
            return Ok(FdmlCondition::LhsLike(parse_lhs_construct(cur)?));
        }
        if cur.eat_kw("LENGTH") {
            let op = cur.expect_comparison()?;
            return Ok(FdmlCondition::LhsLength(op, cur.uint()?));
        }
        return cur.unexpected("LIKE or LENGTH after LHS");
    }
    if cur.eat_kw("RHS") {
        cur.expect_kw("LIKE")?;
        return Ok(FdmlCondition::RhsLike(parse_subset(cur)?));
    }
    if cur.eat_kw("ERROR") {
        if !cur.eat_sym(Sym::Le) {
            cur.eat_sym(Sym::Eq);
        }
        return Ok(FdmlCondition::ErrorLeq(cur.real()?));
    }
    cur.unexpected("condition (LHS, RHS, ERROR or `(`)")
}

impl fmt::Display for FdmlCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let joined = |f: &mut fmt::Formatter<'_>, parts: &[FdmlCondition], sep: &str| {
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                match p {
                    FdmlCondition::And(_) | FdmlCondition::Or(_) => write!(f, "({p})")?,
                    _ => write!(f, "{p}")?,
                }
            }
            Ok(())
        };
        match self {
            FdmlCondition::LhsLike(c) => write!(f, "LHS LIKE {c}"),
            FdmlCondition::RhsLike(s) => write!(f, "RHS LIKE {s}"),
            FdmlCondition::LhsLength(op, k) => write!(f, "LHS LENGTH {op} {k}"),
            FdmlCondition::ErrorLeq(t) => write!(f, "ERROR {}", fmt_real(*t)),
            FdmlCondition::And(v) => joined(f, v, " AND "),
            FdmlCondition::Or(v) => joined(f, v, " OR "),
        }
    }
}

impl fmt::Display for FdmlQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SELECTDEP ")?;
        match self.projection {
            FdmlProjection::Star => f.write_str("*")?,
            FdmlProjection::LhsRhs => f.write_str("LHS -> RHS")?,
        }
        write!(f, " FROM {}", quote_ident(&self.source))?;
        if let Some(c) = &self.filter {
            write!(f, " WHERE {c}")?;
        }
        Ok(())
    }
}

/// Condition with every pattern expanded against one schema.
enum Compiled {
    Lhs(Vec<AttrNames>),
    Rhs(AttrNames),
    Length(CmpOp, usize),
    Error(f64),
    And(Vec<Compiled>),
    Or(Vec<Compiled>),
}

fn compile(c: &FdmlCondition, schema: &[String]) -> Compiled {
    match c {
        FdmlCondition::LhsLike(lc) => Compiled::Lhs(lc.alternatives(schema)),
        FdmlCondition::RhsLike(s) => {
            Compiled::Rhs(s.alternatives(schema).into_iter().flatten().collect())
        }
        FdmlCondition::LhsLength(op, k) => Compiled::Length(*op, *k),
        FdmlCondition::ErrorLeq(t) => Compiled::Error(*t),
        FdmlCondition::And(v) => Compiled::And(v.iter().map(|c| compile(c, schema)).collect()),
        FdmlCondition::Or(v) => Compiled::Or(v.iter().map(|c| compile(c, schema)).collect()),
    }
}

impl Compiled {
    fn matches(&self, e: &FdEntry) -> bool {
        match self {
            Compiled::Lhs(alts) => alts
                .iter()
                .any(|alt| alt.iter().all(|a| e.lhs.binary_search(a).is_ok())),
            Compiled::Rhs(names) => names.contains(&e.rhs),
            Compiled::Length(op, k) => op.compare_usize(e.lhs.len(), *k),
            Compiled::Error(t) => e.error <= *t,
            Compiled::And(v) => v.iter().all(|c| c.matches(e)),
            Compiled::Or(v) => v.iter().any(|c| c.matches(e)),
        }
    }
}

/// Entries of `fs` satisfying the query's condition, in canonical order.
/// An LHS pattern matches when the entry's left side contains one of its
/// alternatives; an RHS pattern when the right side lies in one of them.
pub fn eval_fdml(q: &FdmlQuery, fs: &FdSet) -> Vec<FdEntry> {
    let compiled = q.filter.as_ref().map(|c| compile(c, &fs.attributes));
    fs.entries()
        .iter()
        .filter(|e| compiled.as_ref().is_none_or(|c| c.matches(e)))
        .cloned()
        .collect()
}
