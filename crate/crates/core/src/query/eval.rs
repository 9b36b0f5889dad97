use super::{
    condition_to_tableau, value_distance, Condition, ExtendedSelect, FdPredicate, FdPredicateKind,
    Projection,
};
use crate::error::{Error, Result};
use crate::partition::{pair_ratio, violating_pairs, violating_rows, FdCandidate, Pli};
use crate::relation::{eval_row_predicate, Relation, RowPredicate, RowSet, Value};
use crate::table::{Cell, ResultTable};

pub const DEFAULT_VIOLATES_THRESHOLD: f64 = 0.75;

#[derive(Debug, Clone, PartialEq)]
pub struct QueryResult {
    /// Selected source rows, ascending.
    pub rows: RowSet,
    pub table: ResultTable,
    /// Qualifying attributes of a DEPENDENT projection.
    pub dependent: Option<Vec<String>>,
}

fn check_error(error: f64) -> Result<f64> {
    if (0.0..1.0).contains(&error) {
        Ok(error)
    } else {
        Err(Error::Parameter(format!(
            "error bound {error} is outside [0, 1)"
        )))
    }
}

fn candidate<S: AsRef<str>>(relation: &Relation, lhs: &[S], rhs: &str) -> Result<FdCandidate> {
    if lhs.is_empty() {
        return Err(Error::Parameter(
            "dependency needs a non-empty left side".into(),
        ));
    }
    Ok(FdCandidate::new(
        relation.attr_indices(lhs)?,
        relation.attr_index(rhs)?,
    ))
}

/// Rows an ON-condition admits, matched through its pattern tableau over the
/// dependency's attributes.
fn scope(relation: &Relation, attrs: &[usize], on: Option<&RowPredicate>) -> Result<RowSet> {
    let Some(cond) = on else {
        return Ok(RowSet::all(relation.len()));
    };
    cond.bind(relation)?;
    let mut names: Vec<String> = Vec::new();
    for &a in attrs {
        let n = relation.attr_name(a).to_string();
        if !names.contains(&n) {
            names.push(n);
        }
    }
    condition_to_tableau(cond, &names).matching_rows(relation)
}

/// Error of the dependency measured on its scope; 0 for fewer than two rows.
pub fn scoped_error<S: AsRef<str>>(
    relation: &Relation,
    lhs: &[S],
    rhs: &str,
    on: Option<&RowPredicate>,
) -> Result<f64> {
    let cand = candidate(relation, lhs, rhs)?;
    let rows = scope(relation, &cand.attributes(), on)?;
    Ok(pair_ratio(
        violating_pairs(relation, &cand, &rows),
        rows.len() as u64,
    ))
}

/// Scope rows outside every left-side cluster that carries two distinct
/// right-side values. With an error bound, the whole result is empty when
/// the dependency's error on the scope exceeds the bound.
pub fn eval_holds<S: AsRef<str>>(
    relation: &Relation,
    lhs: &[S],
    rhs: &str,
    on: Option<&RowPredicate>,
    error: Option<f64>,
) -> Result<RowSet> {
    let error = error.map(check_error).transpose()?;
    let cand = candidate(relation, lhs, rhs)?;
    let rows = scope(relation, &cand.attributes(), on)?;
    if let Some(t) = error {
        let e = pair_ratio(violating_pairs(relation, &cand, &rows), rows.len() as u64);
        if e > t {
            return Ok(RowSet::empty());
        }
    }
    Ok(rows.difference(&violating_rows(relation, &cand, &rows)))
}

/// Scope rows inside a violating left-side cluster.
pub fn eval_not_holds<S: AsRef<str>>(
    relation: &Relation,
    lhs: &[S],
    rhs: &str,
    on: Option<&RowPredicate>,
) -> Result<RowSet> {
    let cand = candidate(relation, lhs, rhs)?;
    let rows = scope(relation, &cand.attributes(), on)?;
    Ok(violating_rows(relation, &cand, &rows))
}

/// Rows whose `suspect` value is within `threshold` of a different value
/// held by another row of the same group, where groups agree on the rest of
/// the left side and on the right side.
pub fn eval_violates<S: AsRef<str>>(
    relation: &Relation,
    suspect: &str,
    lhs: &[S],
    rhs: &[S],
    on: Option<&RowPredicate>,
    threshold: Option<f64>,
) -> Result<RowSet> {
    let threshold = threshold.unwrap_or(DEFAULT_VIOLATES_THRESHOLD);
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::Parameter(format!(
            "distance threshold {threshold} must be non-negative"
        )));
    }
    let s = relation.attr_index(suspect)?;
    let lhs = relation.attr_indices(lhs)?;
    let rhs = relation.attr_indices(rhs)?;
    if !lhs.contains(&s) {
        return Err(Error::Contract(format!(
            "suspect \"{suspect}\" is not on the left side of the dependency"
        )));
    }
    let mut key: Vec<usize> = lhs
        .iter()
        .chain(&rhs)
        .copied()
        .filter(|&a| a != s)
        .collect();
    key.sort_unstable();
    key.dedup();
    let mut all = lhs.clone();
    all.extend(&rhs);
    let rows = scope(relation, &all, on)?;
    let groups = Pli::for_attributes(relation, &key, &rows);

    let mut out = Vec::new();
    for cluster in groups.clusters() {
        let mut distinct: Vec<&Value> = Vec::new();
        for &r in cluster {
            let v = relation.value(r, s);
            if !distinct.contains(&v) {
                distinct.push(v);
            }
        }
        if distinct.len() < 2 {
            continue;
        }
        let close: Vec<bool> = distinct
            .iter()
            .map(|a| {
                distinct
                    .iter()
                    .filter(|b| *b != a)
                    .any(|b| value_distance(a, b) <= threshold)
            })
            .collect();
        for &r in cluster {
            let v = relation.value(r, s);
            let k = distinct.iter().position(|d| *d == v).unwrap();
            if close[k] {
                out.push(r);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Attributes outside `x` for which `x` is a minimal determinant: `x -> A`
/// is within the error bound and no non-empty proper subset of `x` is.
/// Schema order.
pub fn eval_dependent<S: AsRef<str>>(
    relation: &Relation,
    x: &[S],
    error: Option<f64>,
) -> Result<Vec<String>> {
    if x.is_empty() {
        return Err(Error::Parameter(
            "DEPENDENT needs at least one attribute".into(),
        ));
    }
    let t = check_error(error.unwrap_or(0.0))?;
    let mut x = relation.attr_indices(x)?;
    x.sort_unstable();
    x.dedup();
    if x.len() > 20 {
        return Err(Error::Unsupported(
            "DEPENDENT is limited to 20 determinant attributes".into(),
        ));
    }
    let all = RowSet::all(relation.len());
    let n = relation.len() as u64;
    let within = |lhs: Vec<usize>, a: usize| {
        pair_ratio(
            violating_pairs(relation, &FdCandidate::new(lhs, a), &all),
            n,
        ) <= t
    };
    let full = (1u32 << x.len()) - 1;
    let mut out = Vec::new();
    for a in 0..relation.arity() {
        if x.contains(&a) || !within(x.clone(), a) {
            continue;
        }
        let subset = |m: u32| -> Vec<usize> {
            (0..x.len())
                .filter(|b| m & (1 << b) != 0)
                .map(|b| x[b])
                .collect()
        };
        if (1..full).all(|m| !within(subset(m), a)) {
            out.push(relation.attr_name(a).to_string());
        }
    }
    Ok(out)
}

/// NOT applied to a subtree: FD predicates switch to their paired form,
/// boolean nodes follow De Morgan.
fn eval_condition(relation: &Relation, c: &Condition, negated: bool) -> Result<RowSet> {
    let n = relation.len();
    match c {
        Condition::Row(p) => {
            let rows = eval_row_predicate(relation, p)?;
            Ok(if negated { rows.complement(n) } else { rows })
        }
        Condition::Not(inner) => eval_condition(relation, inner, !negated),
        Condition::And(parts) | Condition::Or(parts) => {
            let conjunction = matches!(c, Condition::And(_)) != negated;
            let mut acc: Option<RowSet> = None;
            for p in parts {
                let rows = eval_condition(relation, p, negated)?;
                acc = Some(match acc {
                    None => rows,
                    Some(a) if conjunction => a.intersect(&rows),
                    Some(a) => a.union(&rows),
                });
            }
            Ok(acc.unwrap_or_else(|| {
                if conjunction {
                    RowSet::all(n)
                } else {
                    RowSet::empty()
                }
            }))
        }
        Condition::Fd(p) => eval_fd(relation, p, negated),
    }
}

fn single_rhs(p: &FdPredicate) -> Result<&str> {
    match p.rhs.as_slice() {
        [a] => Ok(a),
        _ => Err(Error::Contract(format!(
            "{p} must have exactly one right-side attribute"
        ))),
    }
}

fn eval_fd(relation: &Relation, p: &FdPredicate, negated: bool) -> Result<RowSet> {
    let on = p.on.as_ref();
    match (&p.kind, negated) {
        (FdPredicateKind::Holds, false) => {
            eval_holds(relation, &p.lhs, single_rhs(p)?, on, p.error)
        }
        (FdPredicateKind::Holds, true) => match p.error {
            None => eval_not_holds(relation, &p.lhs, single_rhs(p)?, on),
            Some(_) => Err(Error::Unsupported(
                "NOT over an approximate HOLDS has no paired predicate".into(),
            )),
        },
        (FdPredicateKind::NotHolds, false) => eval_not_holds(relation, &p.lhs, single_rhs(p)?, on),
        (FdPredicateKind::NotHolds, true) => eval_holds(relation, &p.lhs, single_rhs(p)?, on, None),
        (FdPredicateKind::Violates { suspect }, neg) => {
            let rows = eval_violates(relation, suspect, &p.lhs, &p.rhs, on, p.error)?;
            Ok(if neg {
                rows.complement(relation.len())
            } else {
                rows
            })
        }
    }
}

fn project(relation: &Relation, rows: &RowSet, columns: &[String]) -> Result<ResultTable> {
    let idx = relation.attr_indices(columns)?;
    let mut t = ResultTable::new(columns.to_vec());
    t.rows = rows
        .iter()
        .map(|r| {
            idx.iter()
                .map(|&a| Cell::Value(relation.value(r, a).clone()))
                .collect()
        })
        .collect();
    t.row_ids = Some(rows.iter().collect());
    Ok(t)
}

/// Runs a query: FD predicates on their own scopes first, then the boolean
/// combination with row conditions, then the projection. DEPENDENT is
/// computed over the selected rows.
pub fn execute(query: &ExtendedSelect, relation: &Relation) -> Result<QueryResult> {
    let rows = match &query.filter {
        Some(c) => eval_condition(relation, c, false)?,
        None => RowSet::all(relation.len()),
    };
    match &query.projection {
        Projection::Star => {
            let table = project(relation, &rows, &relation.attribute_names())?;
            Ok(QueryResult {
                rows,
                table,
                dependent: None,
            })
        }
        Projection::Attributes(a) => {
            let table = project(relation, &rows, a)?;
            Ok(QueryResult {
                rows,
                table,
                dependent: None,
            })
        }
        Projection::Dependent { on, error } => {
            let selected = relation.select_rows(&rows);
            let dependent = eval_dependent(&selected, on, *error)?;
            let table = project(relation, &rows, &dependent)?;
            Ok(QueryResult {
                rows,
                table,
                dependent: Some(dependent),
            })
        }
    }
}

fn row_conditions(c: &Condition, out: &mut Vec<String>) {
    match c {
        Condition::Row(p) => out.push(p.to_string()),
        Condition::And(v) | Condition::Or(v) => v.iter().for_each(|x| row_conditions(x, out)),
        Condition::Not(x) => row_conditions(x, out),
        Condition::Fd(_) => {}
    }
}

fn fd_predicates<'a>(c: &'a Condition, out: &mut Vec<&'a FdPredicate>) {
    match c {
        Condition::Fd(p) => out.push(p),
        Condition::And(v) | Condition::Or(v) => v.iter().for_each(|x| fd_predicates(x, out)),
        Condition::Not(x) => fd_predicates(x, out),
        Condition::Row(_) => {}
    }
}

/// Evaluation plan as text lines.
pub fn explain(query: &ExtendedSelect) -> Vec<String> {
    let mut out = vec![query.to_string()];
    let (mut fds, mut rows) = (Vec::new(), Vec::new());
    if let Some(c) = &query.filter {
        fd_predicates(c, &mut fds);
        row_conditions(c, &mut rows);
    }
    if !fds.is_empty() {
        out.push("dependency predicates, each on its own scope:".into());
        for (k, p) in fds.iter().enumerate() {
            out.push(format!("  {}. {p}", k + 1));
            if let Some(on) = &p.on {
                let mut attrs = p.lhs.clone();
                attrs.extend(p.rhs.iter().filter(|a| !p.lhs.contains(a)).cloned());
                for line in condition_to_tableau(on, &attrs).to_string().lines() {
                    out.push(format!("     {line}"));
                }
            }
        }
    }
    if !rows.is_empty() {
        out.push("row conditions, applied to the rows the dependency predicates keep:".into());
        out.extend(rows.into_iter().map(|r| format!("  {r}")));
    }
    if !fds.is_empty() {
        out.push("note: dependency predicates are evaluated before row conditions".into());
    }
    out.push(match &query.projection {
        Projection::Star => "projection: all attributes".into(),
        Projection::Attributes(a) => format!("projection: {}", a.join(", ")),
        Projection::Dependent { on, .. } => format!(
            "projection: attributes minimally determined by {} over the selected rows",
            on.join(", ")
        ),
    });
    out
}
