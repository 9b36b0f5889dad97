use super::{Condition, ExtendedSelect, FdPredicate, FdPredicateKind, Projection};
use crate::error::{Error, Result};
use crate::relation::RowPredicate;
use crate::syntax::{Cursor, Sym, Tok};

pub fn parse_extended_select(src: &str) -> Result<ExtendedSelect> {
    let mut cur = Cursor::new(src)?;
    let q = select(&mut cur)?;
    cur.expect_end()?;
    Ok(q)
}

/// A standalone row condition, as used by `UPDATE ... WHERE`.
pub fn parse_row_predicate(src: &str) -> Result<RowPredicate> {
    let mut cur = Cursor::new(src)?;
    let p = row_or(&mut cur)?;
    cur.expect_end()?;
    Ok(p)
}

pub(crate) fn select(cur: &mut Cursor) -> Result<ExtendedSelect> {
    cur.expect_kw("SELECT")?;
    let projection = if cur.eat_sym(Sym::Star) {
        Projection::Star
    } else if cur.eat_kw("DEPENDENT") {
        dependent(cur)?
    } else {
        Projection::Attributes(attribute_list(cur)?)
    };
    cur.expect_kw("FROM")?;
    let source = cur.name()?;
    let filter = if cur.eat_kw("WHERE") {
        Some(or_expr(cur)?)
    } else {
        None
    };
    Ok(ExtendedSelect {
        projection,
        source,
        filter,
    })
}

fn dependent(cur: &mut Cursor) -> Result<Projection> {
    cur.expect_sym(Sym::LParen)?;
    let on = if cur.eat_sym(Sym::LBracket) {
        let a = attribute_list(cur)?;
        cur.expect_sym(Sym::RBracket)?;
        a
    } else {
        attribute_list(cur)?
    };
    let error = if cur.eat_sym(Sym::Comma) {
        Some(error_clause(cur)?)
    } else {
        None
    };
    cur.expect_sym(Sym::RParen)?;
    Ok(Projection::Dependent { on, error })
}

/// `ERROR [= | <=] real`
fn error_clause(cur: &mut Cursor) -> Result<f64> {
    cur.expect_kw("ERROR")?;
    if !cur.eat_sym(Sym::Eq) {
        cur.eat_sym(Sym::Le);
    }
    cur.real()
}

/// Comma-separated attributes; stops before `, ERROR`.
fn attribute_list(cur: &mut Cursor) -> Result<Vec<String>> {
    let mut out = vec![cur.attribute()?];
    while cur.is_sym(Sym::Comma) && !cur.is_kw_at(1, "ERROR") {
        cur.advance();
        out.push(cur.attribute()?);
    }
    Ok(out)
}

fn and_all(mut parts: Vec<Condition>) -> Condition {
    if parts.len() == 1 {
        return parts.pop().unwrap();
    }
    if parts.iter().all(|p| matches!(p, Condition::Row(_))) {
        return Condition::Row(RowPredicate::And(parts.into_iter().map(into_row).collect()));
    }
    Condition::And(parts)
}

fn or_all(mut parts: Vec<Condition>) -> Condition {
    if parts.len() == 1 {
        return parts.pop().unwrap();
    }
    if parts.iter().all(|p| matches!(p, Condition::Row(_))) {
        return Condition::Row(RowPredicate::Or(parts.into_iter().map(into_row).collect()));
    }
    Condition::Or(parts)
}

fn negate(c: Condition) -> Condition {
    match c {
        Condition::Row(p) => Condition::Row(RowPredicate::Not(Box::new(p))),
        other => Condition::Not(Box::new(other)),
    }
}

fn into_row(c: Condition) -> RowPredicate {
    match c {
        Condition::Row(p) => p,
        _ => unreachable!("checked by caller"),
    }
}

fn or_expr(cur: &mut Cursor) -> Result<Condition> {
    let mut parts = vec![and_expr(cur)?];
    while cur.eat_kw("OR") {
        parts.push(and_expr(cur)?);
    }
    Ok(or_all(parts))
}

fn and_expr(cur: &mut Cursor) -> Result<Condition> {
    let mut parts = vec![unary(cur)?];
    while cur.eat_kw("AND") {
        parts.push(unary(cur)?);
    }
    Ok(and_all(parts))
}

fn unary(cur: &mut Cursor) -> Result<Condition> {
    if cur.is_kw("NOT") && cur.is_kw_at(1, "HOLDS") {
        cur.advance();
        cur.advance();
        return fd_predicate(cur, FdPredicateKind::NotHolds);
    }
    if cur.eat_kw("NOT") {
        return Ok(negate(unary(cur)?));
    }
    if cur.eat_kw("HOLDS") {
        return fd_predicate(cur, FdPredicateKind::Holds);
    }
    if cur.is_kw("DEPENDENT") {
        return cur.error("DEPENDENT is a projection, not a row condition");
    }
    if cur.is_attribute() && cur.is_kw_at(1, "VIOLATES") {
        let suspect = cur.attribute()?;
        cur.advance();
        return fd_predicate(cur, FdPredicateKind::Violates { suspect });
    }
    for (open, close) in [(Sym::LParen, Sym::RParen), (Sym::LBracket, Sym::RBracket)] {
        if cur.eat_sym(open) {
            let inner = or_expr(cur)?;
            cur.expect_sym(close)?;
            return Ok(inner);
        }
    }
    row_atom(cur).map(Condition::Row)
}

fn fd_predicate(cur: &mut Cursor, kind: FdPredicateKind) -> Result<Condition> {
    cur.expect_sym(Sym::LParen)?;
    let lhs = attribute_list(cur)?;
    cur.expect_sym(Sym::Arrow)?;
    let rhs = attribute_list(cur)?;
    let on = if cur.eat_kw("ON") {
        Some(row_or(cur)?)
    } else {
        None
    };
    let error = if cur.eat_sym(Sym::Comma) {
        if kind == FdPredicateKind::NotHolds {
            return cur.error("NOT HOLDS takes no ERROR bound");
        }
        Some(error_clause(cur)?)
    } else {
        None
    };
    cur.expect_sym(Sym::RParen)?;
    let single = |a: String| {
        Condition::Fd(FdPredicate {
            kind: kind.clone(),
            lhs: lhs.clone(),
            rhs: vec![a],
            on: on.clone(),
            error,
        })
    };
    Ok(match kind {
        FdPredicateKind::Holds => Condition::And(rhs.into_iter().map(single).collect()),
        FdPredicateKind::NotHolds => Condition::Or(rhs.into_iter().map(single).collect()),
        FdPredicateKind::Violates { .. } => {
            return Ok(Condition::Fd(FdPredicate {
                kind,
                lhs,
                rhs,
                on,
                error,
            }))
        }
    })
    .map(|c| match c {
        Condition::And(mut v) | Condition::Or(mut v) if v.len() == 1 => v.pop().unwrap(),
        c => c,
    })
}

pub(crate) fn row_or(cur: &mut Cursor) -> Result<RowPredicate> {
    let mut parts = vec![row_and(cur)?];
    while cur.eat_kw("OR") {
        parts.push(row_and(cur)?);
    }
    Ok(if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        RowPredicate::Or(parts)
    })
}

fn row_and(cur: &mut Cursor) -> Result<RowPredicate> {
    let mut parts = vec![row_unary(cur)?];
    while cur.eat_kw("AND") {
        parts.push(row_unary(cur)?);
    }
    Ok(if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        RowPredicate::And(parts)
    })
}

fn row_unary(cur: &mut Cursor) -> Result<RowPredicate> {
    if cur.eat_kw("NOT") {
        return Ok(RowPredicate::Not(Box::new(row_unary(cur)?)));
    }
    for (open, close) in [(Sym::LParen, Sym::RParen), (Sym::LBracket, Sym::RBracket)] {
        if cur.eat_sym(open) {
            let inner = row_or(cur)?;
            cur.expect_sym(close)?;
            return Ok(inner);
        }
    }
    row_atom(cur)
}

fn row_atom(cur: &mut Cursor) -> Result<RowPredicate> {
    if cur.eat_kw("TRUE") {
        return Ok(RowPredicate::always());
    }
    if cur.eat_kw("FALSE") {
        return Ok(RowPredicate::never());
    }
    if let Tok::Ident(word) = &cur.peek().tok {
        if *cur.peek_nth(1) == Tok::Sym(Sym::LParen) {
            let msg = format!("unknown predicate `{word}`");
            return Err(Error::syntax(cur.pos(), msg));
        }
    }
    let attr = cur.attribute()?;
    let op = cur.expect_comparison()?;
    let value = cur.literal()?;
    Ok(RowPredicate::compare(attr, op, value))
}
