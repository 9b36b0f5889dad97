//! `MINEFD <name> AS SELECT LHS -> RHS [, ERROR] [WHERE ...] FROM <table>
//! [ERROR <real>]`

use std::fmt;

use super::MiningSpec;
use crate::error::{Error, Result};
use crate::fdstore::{parse_subset, SubsetExpr};
use crate::relation::CmpOp;
use crate::syntax::{fmt_real, quote_ident, Cursor, Sym};

#[derive(Debug, Clone, PartialEq)]
pub struct MineStatement {
    pub target: String,
    pub table: String,
    pub lhs_filter: Option<SubsetExpr>,
    pub rhs_filter: Option<SubsetExpr>,
    pub lhs_length: Vec<(CmpOp, usize)>,
    /// Trailing `ERROR r`: the mining threshold.
    pub error_threshold: Option<f64>,
    /// `, ERROR` in the select list: show the error column.
    pub show_error: bool,
}

impl MineStatement {
    pub fn to_spec(&self) -> Result<MiningSpec> {
        let mut min = 1usize;
        let mut max: Option<usize> = None;
        let mut cap = |m: usize| max = Some(max.map_or(m, |x| x.min(m)));
        for &(op, k) in &self.lhs_length {
            match op {
                CmpOp::Eq => {
                    min = min.max(k);
                    cap(k);
                }
                CmpOp::Le => cap(k),
                CmpOp::Lt => cap(k.checked_sub(1).ok_or_else(|| {
                    Error::Parameter("LHS LENGTH < 0 admits no dependency".into())
                })?),
                CmpOp::Ge => min = min.max(k),
                CmpOp::Gt => min = min.max(k + 1),
                CmpOp::Ne => {
                    return Err(Error::Unsupported(
                        "LHS LENGTH <> is not supported by MINEFD".into(),
                    ))
                }
            }
        }
        let spec = MiningSpec {
            lhs_filter: self.lhs_filter.clone(),
            rhs_filter: self.rhs_filter.clone(),
            min_lhs_len: min,
            max_lhs_len: max,
            error_threshold: self.error_threshold.unwrap_or(0.0),
        };
        spec.validate()?;
        Ok(spec)
    }
}

pub fn parse_minefd(src: &str) -> Result<MineStatement> {
    let mut cur = Cursor::new(src)?;
    cur.expect_kw("MINEFD")?;
    let target = cur.name()?;
    cur.expect_kw("AS")?;
    cur.expect_kw("SELECT")?;
    if !cur.eat_sym(Sym::Star) {
        cur.expect_kw("LHS")?;
        cur.expect_sym(Sym::Arrow)?;
        cur.expect_kw("RHS")?;
    }
    let show_error = if cur.eat_sym(Sym::Comma) {
        cur.expect_kw("ERROR")?;
        true
    } else {
        false
    };
    let mut stmt = MineStatement {
        target,
        table: String::new(),
        lhs_filter: None,
        rhs_filter: None,
        lhs_length: Vec::new(),
        error_threshold: None,
        show_error,
    };
    let mut seen_where = false;
    if cur.eat_kw("WHERE") {
        parse_conditions(&mut cur, &mut stmt)?;
        seen_where = true;
    }
    cur.expect_kw("FROM")?;
    stmt.table = cur.name()?;
    if !seen_where && cur.eat_kw("WHERE") {
        parse_conditions(&mut cur, &mut stmt)?;
    }
    if cur.eat_kw("ERROR") {
        if !cur.eat_sym(Sym::Le) {
            cur.eat_sym(Sym::Eq);
        }
        stmt.error_threshold = Some(cur.real()?);
    }
    cur.expect_end()?;
    Ok(stmt)
}

fn parse_conditions(cur: &mut Cursor, stmt: &mut MineStatement) -> Result<()> {
    loop {
        let pos = cur.pos();
        if cur.eat_kw("LHS") {
            if cur.eat_kw("LIKE") {
                if stmt.lhs_filter.is_some() {
                    return Err(Error::syntax(pos, "only one LHS LIKE condition is allowed"));
                }
                stmt.lhs_filter = Some(parse_subset(cur)?);
            } else if cur.eat_kw("LENGTH") {
                let op = cur.expect_comparison()?;
                stmt.lhs_length.push((op, cur.uint()?));
            } else {
                return cur.unexpected("LIKE or LENGTH after LHS");
            }
        } else if cur.eat_kw("RHS") {
            cur.expect_kw("LIKE")?;
            if stmt.rhs_filter.is_some() {
                return Err(Error::syntax(pos, "only one RHS LIKE condition is allowed"));
            }
            stmt.rhs_filter = Some(parse_subset(cur)?);
        } else {
            return cur.unexpected("LHS or RHS condition");
        }
        if !cur.eat_kw("AND") {
            return Ok(());
        }
    }
}

impl fmt::Display for MineStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MINEFD {} AS SELECT LHS -> RHS",
            quote_ident(&self.target)
        )?;
        if self.show_error {
            f.write_str(", ERROR")?;
        }
        let mut conds = Vec::new();
        if let Some(s) = &self.lhs_filter {
            conds.push(format!("LHS LIKE {s}"));
        }
        if let Some(s) = &self.rhs_filter {
            conds.push(format!("RHS LIKE {s}"));
        }
        for (op, k) in &self.lhs_length {
            conds.push(format!("LHS LENGTH {op} {k}"));
        }
        if !conds.is_empty() {
            write!(f, " WHERE {}", conds.join(" AND "))?;
        }
        write!(f, " FROM {}", quote_ident(&self.table))?;
        if let Some(t) = self.error_threshold {
            write!(f, " ERROR {}", fmt_real(t))?;
        }
        Ok(())
    }
}
