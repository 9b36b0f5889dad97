//! Position list indexes (stripped partitions) and the checks built on them.
//!
//! A PLI keeps only clusters of two or more rows that agree on an attribute
//! set. Validation counts ordered violating pairs: for `X -> A` that is
//! `pairs(X) - pairs(X ∪ A)` where `pairs(p) = Σ |c|(|c|-1)`. Singletons
//! contribute no pairs, so the stripped form loses nothing for this count,
//! whereas comparing stripped cluster counts alone would miss a cluster that
//! sheds a single row.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::relation::{Relation, RowSet, Value};

/// `lhs -> rhs` over attribute indices. The left side is kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FdCandidate {
    pub lhs: Vec<usize>,
    pub rhs: usize,
}

impl FdCandidate {
    pub fn new(mut lhs: Vec<usize>, rhs: usize) -> Self {
        lhs.sort_unstable();
        lhs.dedup();
        FdCandidate { lhs, rhs }
    }

    pub fn is_trivial(&self) -> bool {
        self.lhs.contains(&self.rhs)
    }

    /// `lhs ∪ {rhs}`, sorted.
    pub fn attributes(&self) -> Vec<usize> {
        let mut all = self.lhs.clone();
        all.push(self.rhs);
        all.sort_unstable();
        all.dedup();
        all
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pli {
    clusters: Vec<Vec<usize>>,
    relation_size: usize,
}

const NO_CLUSTER: u32 = u32::MAX;

impl Pli {
    /// Builds a PLI from explicit clusters. Singletons are dropped and the
    /// result is put in canonical order.
    pub fn from_clusters(clusters: Vec<Vec<usize>>, relation_size: usize) -> Self {
        let mut clusters: Vec<Vec<usize>> = clusters
            .into_iter()
            .filter(|c| c.len() >= 2)
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        clusters.sort_by_key(|c| c[0]);
        Pli {
            clusters,
            relation_size,
        }
    }

    /// Partition of the empty attribute set: every scope row in one cluster.
    pub fn universe(scope: &RowSet) -> Self {
        Pli::from_clusters(vec![scope.as_slice().to_vec()], scope.len())
    }

    pub fn for_attribute(relation: &Relation, attr: usize) -> Self {
        Pli::for_attribute_in(relation, attr, &RowSet::all(relation.len()))
    }

    /// PLI of one attribute over the rows in `scope`. Row indices stay those
    /// of `relation`; the partition's size is `|scope|`.
    pub fn for_attribute_in(relation: &Relation, attr: usize, scope: &RowSet) -> Self {
        let mut groups: HashMap<&Value, Vec<usize>> = HashMap::new();
        for row in scope.iter() {
            groups
                .entry(relation.value(row, attr))
                .or_default()
                .push(row);
        }
        Pli::from_clusters(groups.into_values().collect(), scope.len())
    }

    /// PLI of an attribute set over `scope`, by intersecting single-attribute
    /// PLIs.
    pub fn for_attributes(relation: &Relation, attrs: &[usize], scope: &RowSet) -> Self {
        attrs
            .iter()
            .map(|&a| Pli::for_attribute_in(relation, a, scope))
            .reduce(|acc, p| acc.intersect(&p))
            .unwrap_or_else(|| Pli::universe(scope))
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn relation_size(&self) -> usize {
        self.relation_size
    }

    /// Rows that sit inside some cluster.
    pub fn covered(&self) -> usize {
        self.clusters.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Ordered pairs of distinct rows that share a cluster.
    pub fn pair_count(&self) -> u64 {
        self.clusters
            .iter()
            .map(|c| {
                let k = c.len() as u64;
                k * (k - 1)
            })
            .sum()
    }

    /// Stripped partition of the union of both attribute sets. Rows land in
    /// one result cluster iff they share a cluster in both inputs.
    ///
    /// Panics if the two partitions describe different row counts.
    pub fn intersect(&self, other: &Pli) -> Pli {
        assert_eq!(
            self.relation_size, other.relation_size,
            "contract violation: intersecting partitions of different sizes"
        );
        let Some(max_row) = self.clusters.iter().flatten().max().copied() else {
            return Pli {
                clusters: Vec::new(),
                relation_size: self.relation_size,
            };
        };
        let mut probe = vec![NO_CLUSTER; max_row + 1];
        for (id, c) in self.clusters.iter().enumerate() {
            for &row in c {
                probe[row] = id as u32;
            }
        }
        let lookup = |row: usize| match probe.get(row) {
            Some(&id) if id != NO_CLUSTER => Some(id as usize),
            _ => None,
        };

        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); self.clusters.len()];
        let mut out = Vec::new();
        for c in &other.clusters {
            for &row in c {
                if let Some(id) = lookup(row) {
                    buckets[id].push(row);
                }
            }
            for &row in c {
                if let Some(id) = lookup(row) {
                    let bucket = &mut buckets[id];
                    if bucket.len() >= 2 {
                        out.push(std::mem::take(bucket));
                    } else {
                        bucket.clear();
                    }
                }
            }
        }
        out.sort_by_key(|c| c[0]);
        Pli {
            clusters: out,
            relation_size: self.relation_size,
        }
    }
}

pub fn build_pli(relation: &Relation, attr: usize) -> Pli {
    Pli::for_attribute(relation, attr)
}

pub fn intersect(a: &Pli, b: &Pli) -> Pli {
    a.intersect(b)
}

/// Ordered pairs of scope rows agreeing on `lhs` but not on `rhs`.
pub fn violating_pairs(relation: &Relation, cand: &FdCandidate, scope: &RowSet) -> u64 {
    let lhs = Pli::for_attributes(relation, &cand.lhs, scope);
    let with_rhs = lhs.intersect(&Pli::for_attribute_in(relation, cand.rhs, scope));
    lhs.pair_count() - with_rhs.pair_count()
}

/// True iff no two rows of `scope` agree on the left side and differ on the
/// right side.
pub fn fd_holds(relation: &Relation, cand: &FdCandidate, scope: &RowSet) -> bool {
    cand.is_trivial() || violating_pairs(relation, cand, scope) == 0
}

/// Fraction of ordered row pairs of `scope` that violate the candidate:
/// `violating / (n² - n)` with `n = |scope|`, and 0 when `n = 1`.
pub fn error_measure(relation: &Relation, cand: &FdCandidate, scope: &RowSet) -> Result<f64> {
    let n = scope.len() as u64;
    if n == 0 {
        return Err(Error::Contract("error measure over an empty scope".into()));
    }
    if n == 1 {
        return Ok(0.0);
    }
    Ok(pair_ratio(violating_pairs(relation, cand, scope), n))
}

pub(crate) fn pair_ratio(violating: u64, n: u64) -> f64 {
    if n <= 1 {
        0.0
    } else {
        violating as f64 / (n * n - n) as f64
    }
}

/// Rows of `scope` in a left-side cluster that carries two or more distinct
/// right-side values.
pub fn violating_rows(relation: &Relation, cand: &FdCandidate, scope: &RowSet) -> RowSet {
    let lhs = Pli::for_attributes(relation, &cand.lhs, scope);
    lhs.clusters()
        .iter()
        .filter(|c| {
            let first = relation.value(c[0], cand.rhs);
            c[1..].iter().any(|&r| relation.value(r, cand.rhs) != first)
        })
        .flatten()
        .copied()
        .collect()
}
