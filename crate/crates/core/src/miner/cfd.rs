//! Support and confidence of conditional dependencies with a given pattern
//! tableau. Cells may carry comparison operators, not just constants.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::partition::FdCandidate;
use crate::query::{PatternCell, PatternTableau};
use crate::relation::{Relation, RowSet, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct Cfd {
    pub fd: FdCandidate,
    pub tableau: PatternTableau,
}

/// Per pattern row: cells on the left side (by attribute index) and the cell
/// on the right side.
struct Patterns {
    lhs: Vec<Vec<(usize, PatternCell)>>,
    rhs: Vec<PatternCell>,
}

fn split(relation: &Relation, fd: &FdCandidate, tableau: &PatternTableau) -> Result<Patterns> {
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    let attrs = tableau
        .attributes
        .iter()
        .map(|a| relation.attr_index(a))
        .collect::<Result<Vec<_>>>()?;
    for row in &tableau.rows {
        if let Some((a, _)) = row.residual.first() {
            return Err(Error::Contract(format!(
                "pattern constrains \"{a}\", which is not part of the dependency"
            )));
        }
        let mut l = Vec::new();
        let mut r = PatternCell::wildcard();
        for (&a, cell) in attrs.iter().zip(&row.cells) {
            if cell.is_wildcard() {
                continue;
            }
            if a == fd.rhs {
                r.conds.extend(cell.conds.iter().cloned());
            } else if fd.lhs.contains(&a) {
                l.push((a, cell.clone()));
            } else {
                return Err(Error::Contract(format!(
                    "pattern constrains \"{}\", which is not part of the dependency",
                    relation.attr_name(a)
                )));
            }
        }
        lhs.push(l);
        rhs.push(r);
    }
    Ok(Patterns { lhs, rhs })
}

/// Fraction of rows matching every non-wildcard cell of a one-row tableau.
/// Wildcards may sit on attributes outside the dependency. An empty table
/// has support 0.
pub fn cfd_support(relation: &Relation, fd: &FdCandidate, pattern: &PatternTableau) -> Result<f64> {
    if pattern.rows.len() != 1 {
        return Err(Error::Contract(format!(
            "support is defined for a single pattern row, got {}",
            pattern.rows.len()
        )));
    }
    let p = split(relation, fd, pattern)?;
    if relation.is_empty() {
        return Ok(0.0);
    }
    let matched = relation
        .rows()
        .iter()
        .filter(|row| {
            p.lhs[0].iter().all(|(a, c)| c.matches(&row[*a])) && p.rhs[0].matches(&row[fd.rhs])
        })
        .count();
    Ok(matched as f64 / relation.len() as f64)
}

/// A largest subset of rows satisfying the CFD. Within each group of rows
/// equal on the left side, the patterns that apply to the group fix which
/// right-side values are admissible; the most frequent admissible value is
/// kept (ties go to the value seen first).
pub fn max_satisfying_rows(relation: &Relation, cfd: &Cfd) -> Result<RowSet> {
    let p = split(relation, &cfd.fd, &cfd.tableau)?;
    let mut groups: HashMap<Vec<&Value>, Vec<usize>> = HashMap::new();
    let mut order = Vec::new();
    for (i, row) in relation.rows().iter().enumerate() {
        let key: Vec<&Value> = cfd.fd.lhs.iter().map(|&a| &row[a]).collect();
        let g = groups.entry(key).or_default();
        if g.is_empty() {
            order.push(i);
        }
        g.push(i);
    }
    let mut kept = Vec::new();
    for first in order {
        let row = relation.row(first);
        let key: Vec<&Value> = cfd.fd.lhs.iter().map(|&a| &row[a]).collect();
        let members = &groups[&key];
        let applicable: Vec<usize> = (0..p.lhs.len())
            .filter(|&k| p.lhs[k].iter().all(|(a, c)| c.matches(&row[*a])))
            .collect();
        if applicable.is_empty() {
            kept.extend(members);
            continue;
        }
        let mut counts: Vec<(&Value, Vec<usize>)> = Vec::new();
        for &m in members {
            let v = relation.value(m, cfd.fd.rhs);
            if !applicable.iter().all(|&k| p.rhs[k].matches(v)) {
                continue;
            }
            match counts.iter_mut().find(|(x, _)| *x == v) {
                Some((_, rows)) => rows.push(m),
                None => counts.push((v, vec![m])),
            }
        }
        let best = counts
            .into_iter()
            .fold(None::<(&Value, Vec<usize>)>, |best, c| match best {
                Some(b) if b.1.len() >= c.1.len() => Some(b),
                _ => Some(c),
            });
        if let Some((_, rows)) = best {
            kept.extend(rows);
        }
    }
    Ok(kept.into_iter().collect())
}

/// `max |r'| / |r|` over sub-instances `r'` satisfying the CFD; 1 for an
/// empty table.
pub fn cfd_confidence(relation: &Relation, cfd: &Cfd) -> Result<f64> {
    let kept = max_satisfying_rows(relation, cfd)?;
    if relation.is_empty() {
        return Ok(1.0);
    }
    Ok(kept.len() as f64 / relation.len() as f64)
}
