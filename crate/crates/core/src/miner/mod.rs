//! Discovery of minimal, non-trivial exact and approximate dependencies.
//!
//! The search walks the attribute lattice level by level. Every node keeps
//! its PLI and the right-hand sides still open for it; an RHS closes as soon
//! as some left side determines it within the threshold, and a node with no
//! open RHS is dropped, so none of its supersets are generated.

mod cfd;
mod oracle;
mod statement;

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fdstore::{is_literal_pattern, FdEntry, Origin, SubsetExpr};
use crate::partition::{pair_ratio, Pli};
use crate::relation::{Relation, Value};

pub use cfd::{cfd_confidence, cfd_support, max_satisfying_rows, Cfd};
pub use oracle::brute_force_mine;
pub use statement::{parse_minefd, MineStatement};

#[derive(Debug, Clone, PartialEq)]
pub struct MiningSpec {
    /// Attributes allowed on the left side; `None` allows all.
    pub lhs_filter: Option<SubsetExpr>,
    /// Attributes allowed on the right side; `None` allows all.
    pub rhs_filter: Option<SubsetExpr>,
    pub min_lhs_len: usize,
    pub max_lhs_len: Option<usize>,
    pub error_threshold: f64,
}

impl Default for MiningSpec {
    fn default() -> Self {
        MiningSpec {
            lhs_filter: None,
            rhs_filter: None,
            min_lhs_len: 1,
            max_lhs_len: None,
            error_threshold: 0.0,
        }
    }
}

impl MiningSpec {
    pub fn exact() -> Self {
        MiningSpec::default()
    }

    pub fn approximate(error_threshold: f64) -> Self {
        MiningSpec {
            error_threshold,
            ..MiningSpec::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.error_threshold) {
            return Err(Error::Parameter(format!(
                "error threshold {} outside [0, 1)",
                self.error_threshold
            )));
        }
        if self.max_lhs_len == Some(0) {
            return Err(Error::Parameter(
                "maximum LHS length must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinedFds {
    /// Canonical order: `(|lhs|, lhs, rhs)`.
    pub entries: Vec<FdEntry>,
    pub warnings: Vec<String>,
}

/// Attribute indices admitted by the filters, in schema order.
pub(crate) struct Universe {
    pub lhs: Vec<usize>,
    pub rhs: Vec<usize>,
    pub warnings: Vec<String>,
}

fn resolve_filter(
    filter: Option<&SubsetExpr>,
    relation: &Relation,
    side: &str,
    warnings: &mut Vec<String>,
) -> Result<Vec<usize>> {
    let Some(expr) = filter else {
        return Ok((0..relation.arity()).collect());
    };
    let schema: Vec<String> = relation.attribute_names().into_iter().collect();
    for pat in expr.patterns() {
        let hits = schema.iter().any(|a| crate::fdstore::glob_match(pat, a));
        if !hits {
            if is_literal_pattern(pat) {
                return Err(Error::UnknownAttribute(pat.to_owned()));
            }
            warnings.push(format!("{side} pattern \"{pat}\" matches no attribute"));
        }
    }
    let chosen: crate::fdstore::AttrNames =
        expr.alternatives(&schema).into_iter().flatten().collect();
    if chosen.is_empty() {
        warnings.push(format!(
            "{side} filter admits no attribute; nothing to mine"
        ));
    }
    Ok((0..relation.arity())
        .filter(|&i| chosen.contains(relation.attr_name(i)))
        .collect())
}

pub(crate) fn universe(relation: &Relation, spec: &MiningSpec) -> Result<Universe> {
    spec.validate()?;
    if relation.arity() > 64 {
        return Err(Error::Unsupported(format!(
            "mining supports at most 64 attributes, table has {}",
            relation.arity()
        )));
    }
    let mut warnings = Vec::new();
    let lhs = resolve_filter(spec.lhs_filter.as_ref(), relation, "LHS", &mut warnings)?;
    let rhs = resolve_filter(spec.rhs_filter.as_ref(), relation, "RHS", &mut warnings)?;
    Ok(Universe { lhs, rhs, warnings })
}

pub(crate) fn entry(relation: &Relation, lhs: &[usize], rhs: usize, error: f64) -> FdEntry {
    FdEntry::new(
        lhs.iter().map(|&a| relation.attr_name(a)),
        relation.attr_name(rhs),
        error,
        Origin::Mined,
    )
    .expect("miner emits only non-trivial dependencies")
}

pub(crate) fn finish(mut entries: Vec<FdEntry>, warnings: Vec<String>) -> MinedFds {
    entries.sort_by(|a, b| (a.lhs.len(), &a.lhs, &a.rhs).cmp(&(b.lhs.len(), &b.lhs, &b.rhs)));
    MinedFds { entries, warnings }
}

/// Dense per-column value codes, so cluster refinement counts need no
/// hashing.
fn column_codes(relation: &Relation, attr: usize) -> (Vec<u32>, usize) {
    let mut dict: HashMap<&Value, u32> = HashMap::new();
    let codes = relation
        .rows()
        .iter()
        .map(|row| {
            let next = dict.len() as u32;
            *dict.entry(&row[attr]).or_insert(next)
        })
        .collect();
    (codes, dict.len())
}

/// Ordered pairs inside `pli`'s clusters that disagree on the coded column.
fn violations(pli: &Pli, codes: &[u32], scratch: &mut [u32]) -> u64 {
    let mut total = 0;
    for c in pli.clusters() {
        let k = c.len() as u64;
        let mut agreeing = 0u64;
        for &r in c {
            let slot = &mut scratch[codes[r] as usize];
            agreeing += 2 * u64::from(*slot);
            *slot += 1;
        }
        for &r in c {
            scratch[codes[r] as usize] = 0;
        }
        total += k * (k - 1) - agreeing;
    }
    total
}

struct Node {
    attrs: Vec<usize>,
    mask: u64,
    pli: Pli,
    /// Right-hand sides not yet determined by this set or any subset.
    open: u64,
}

fn bit(a: usize) -> u64 {
    1u64 << a
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&i| mask & bit(i) != 0)
}

/// Mines every FD `X -> A` with `e(X -> A) <= threshold`, `A ∉ X`, `X`
/// non-empty and no proper non-empty subset of `X` also within the
/// threshold. Candidate validation within a level runs on the current rayon
/// pool; the result does not depend on its size.
pub fn mine_fds(relation: &Relation, spec: &MiningSpec) -> Result<MinedFds> {
    let Universe { lhs, rhs, warnings } = universe(relation, spec)?;
    let n = relation.len() as u64;
    let threshold = spec.error_threshold;
    let max_len = spec.max_lhs_len.unwrap_or(lhs.len()).min(lhs.len());
    let rhs_mask = rhs.iter().fold(0u64, |m, &a| m | bit(a));
    if lhs.is_empty() || rhs.is_empty() || max_len == 0 {
        return Ok(finish(Vec::new(), warnings));
    }

    let coded: Vec<(Vec<u32>, usize)> = (0..relation.arity())
        .map(|a| {
            if rhs_mask & bit(a) != 0 {
                column_codes(relation, a)
            } else {
                (Vec::new(), 0)
            }
        })
        .collect();
    let scratch_len = coded.iter().map(|c| c.1).max().unwrap_or(0);
    let singles: HashMap<usize, Pli> = lhs
        .par_iter()
        .map(|&a| (a, Pli::for_attribute(relation, a)))
        .collect();

    let mut level: Vec<Node> = lhs
        .iter()
        .map(|&a| Node {
            attrs: vec![a],
            mask: bit(a),
            pli: singles[&a].clone(),
            open: rhs_mask & !bit(a),
        })
        .collect();

    let mut found = Vec::new();
    for k in 1..=max_len {
        let results: Vec<(u64, Vec<(usize, f64)>)> = level
            .par_iter()
            .map_init(
                || vec![0u32; scratch_len],
                |scratch, node| {
                    let mut open = node.open;
                    let mut hits = Vec::new();
                    for a in bits(node.open) {
                        let v = violations(&node.pli, &coded[a].0, scratch);
                        let e = pair_ratio(v, n);
                        if e <= threshold {
                            open &= !bit(a);
                            hits.push((a, e));
                        }
                    }
                    (open, hits)
                },
            )
            .collect();

        for (node, (open, hits)) in level.iter_mut().zip(results) {
            node.open = open;
            if k >= spec.min_lhs_len {
                for (a, e) in hits {
                    found.push(entry(relation, &node.attrs, a, e));
                }
            }
        }
        if k == max_len {
            break;
        }
        level.retain(|node| node.open != 0);
        level = next_level(level, &singles);
        if level.is_empty() {
            break;
        }
    }
    Ok(finish(found, warnings))
}

/// Apriori join: two nodes sharing all but their last attribute form a
/// candidate, kept only when every one of its subsets one level down
/// survived and some right-hand side is still open for all of them.
fn next_level(level: Vec<Node>, singles: &HashMap<usize, Pli>) -> Vec<Node> {
    let by_mask: HashMap<u64, usize> = level.iter().enumerate().map(|(i, n)| (n.mask, i)).collect();
    let mut plans: Vec<(usize, usize, u64)> = Vec::new();
    let mut start = 0;
    while start < level.len() {
        let prefix = &level[start].attrs[..level[start].attrs.len() - 1];
        let mut end = start + 1;
        while end < level.len() && level[end].attrs[..prefix.len()] == *prefix {
            end += 1;
        }
        for i in start..end {
            for j in i + 1..end {
                let last = *level[j].attrs.last().unwrap();
                let mask = level[i].mask | bit(last);
                let mut open = level[i].open & level[j].open;
                for drop in bits(mask) {
                    if open == 0 {
                        break;
                    }
                    match by_mask.get(&(mask & !bit(drop))) {
                        Some(&s) => open &= level[s].open,
                        None => open = 0,
                    }
                }
                open &= !mask;
                if open != 0 {
                    plans.push((i, last, open));
                }
            }
        }
        start = end;
    }
    plans
        .into_par_iter()
        .map(|(i, last, open)| {
            let base = &level[i];
            let mut attrs = base.attrs.clone();
            attrs.push(last);
            Node {
                attrs,
                mask: base.mask | bit(last),
                pli: base.pli.intersect(&singles[&last]),
                open,
            }
        })
        .collect()
}

/// Runs `f` on a dedicated pool of `threads` workers (at least one).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start {threads} worker threads: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::Kind;

    fn rel(cols: &[&str], rows: &[&[i64]]) -> Relation {
        Relation::new(
            "t",
            cols.iter()
                .map(|c| (c.to_string(), Kind::Integer))
                .collect(),
            rows.iter()
                .map(|r| r.iter().map(|&v| Value::Integer(v)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn shown(m: &MinedFds) -> Vec<String> {
        m.entries.iter().map(|e| e.to_string()).collect()
    }

    #[test]
    fn minimal_cover_of_small_table() {
        // a -> b, (b, c) -> a; c alone determines nothing
        let r = rel(
            &["a", "b", "c"],
            &[&[1, 1, 1], &[1, 1, 2], &[2, 1, 3], &[3, 2, 1], &[3, 2, 3]],
        );
        let m = mine_fds(&r, &MiningSpec::exact()).unwrap();
        assert_eq!(shown(&m), ["a -> b", "b, c -> a"]);
        assert_eq!(m, brute_force_mine(&r, &MiningSpec::exact()).unwrap());
    }

    #[test]
    fn single_attribute_relation_has_no_fds() {
        let r = rel(&["a"], &[&[1], &[2]]);
        assert!(mine_fds(&r, &MiningSpec::exact())
            .unwrap()
            .entries
            .is_empty());
    }

    #[test]
    fn empty_relation_gives_all_unary_fds() {
        let r = rel(&["a", "b", "c"], &[]);
        let m = mine_fds(&r, &MiningSpec::exact()).unwrap();
        assert_eq!(m.entries.len(), 6);
        assert!(m.entries.iter().all(|e| e.lhs.len() == 1));
    }

    #[test]
    fn filters_and_warnings() {
        let r = rel(&["a", "b", "c"], &[&[1, 1, 1], &[1, 1, 2]]);
        let spec = MiningSpec {
            lhs_filter: Some(SubsetExpr::globs(["x*"])),
            ..MiningSpec::exact()
        };
        let m = mine_fds(&r, &spec).unwrap();
        assert!(m.entries.is_empty());
        assert_eq!(m.warnings.len(), 2);
        let spec = MiningSpec {
            rhs_filter: Some(SubsetExpr::globs(["zz"])),
            ..MiningSpec::exact()
        };
        assert!(matches!(
            mine_fds(&r, &spec),
            Err(Error::UnknownAttribute(_))
        ));
        assert!(matches!(
            mine_fds(&r, &MiningSpec::approximate(1.0)),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let r = rel(
            &["a", "b", "c", "d"],
            &[
                &[1, 2, 1, 1],
                &[1, 2, 2, 1],
                &[2, 2, 1, 2],
                &[2, 3, 1, 2],
                &[3, 3, 2, 1],
            ],
        );
        let spec = MiningSpec::approximate(0.15);
        let one = with_threads(1, || mine_fds(&r, &spec)).unwrap().unwrap();
        let four = with_threads(4, || mine_fds(&r, &spec)).unwrap().unwrap();
        assert_eq!(one, four);
        assert_eq!(one, brute_force_mine(&r, &spec).unwrap());
    }
}
