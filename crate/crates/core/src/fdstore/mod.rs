//! Named, persisted collections of dependencies and the FDML language over
//! them.

mod fdml;
mod inference;
mod persist;
mod subset;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relation::Relation;

pub use fdml::{eval_fdml, parse_fdml, FdmlCondition, FdmlProjection, FdmlQuery};
pub use inference::{attr_closure, check_imported, is_implied, ImportFinding};
pub use persist::{read_fdset, write_fdset};
pub(crate) use subset::parse_subset;
pub use subset::{
    eval_subset_expr, glob_match, is_literal_pattern, AttrNames, LhsConstruct, SubsetExpr,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Mined,
    Imported,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Mined => "mined",
            Origin::Imported => "imported",
        })
    }
}

/// `lhs -> rhs` by attribute name, with its measured error.
#[derive(Debug, Clone, PartialEq)]
pub struct FdEntry {
    pub lhs: Vec<String>,
    pub rhs: String,
    pub error: f64,
    pub origin: Origin,
}

impl FdEntry {
    /// Sorts and checks the left side; rejects trivial dependencies and
    /// errors outside `[0, 1)`.
    pub fn new(
        lhs: impl IntoIterator<Item = impl Into<String>>,
        rhs: impl Into<String>,
        error: f64,
        origin: Origin,
    ) -> Result<Self> {
        let mut lhs: Vec<String> = lhs.into_iter().map(Into::into).collect();
        lhs.sort();
        lhs.dedup();
        let rhs = rhs.into();
        if lhs.contains(&rhs) {
            return Err(Error::Parameter(format!(
                "trivial dependency: \"{rhs}\" appears on both sides"
            )));
        }
        if !(0.0..1.0).contains(&error) {
            return Err(Error::Parameter(format!("error {error} outside [0, 1)")));
        }
        Ok(FdEntry {
            lhs,
            rhs,
            error,
            origin,
        })
    }

    pub fn exact(lhs: impl IntoIterator<Item = impl Into<String>>, rhs: impl Into<String>) -> Self {
        FdEntry::new(lhs, rhs, 0.0, Origin::Mined).expect("valid exact dependency")
    }

    pub fn is_exact(&self) -> bool {
        self.error == 0.0
    }

    pub fn key(&self) -> (&[String], &str) {
        (&self.lhs, &self.rhs)
    }

    fn sort_key(&self) -> (usize, &[String], &str) {
        (self.lhs.len(), &self.lhs, &self.rhs)
    }
}

impl fmt::Display for FdEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs.join(", "), self.rhs)
    }
}

/// Dependency collection bound to one snapshot of a table.
#[derive(Debug, Clone, PartialEq)]
pub struct FdSet {
    pub name: String,
    pub table: String,
    pub fingerprint: u64,
    /// Schema of the bound table, in order.
    pub attributes: Vec<String>,
    pub mined_at: String,
    entries: Vec<FdEntry>,
}

impl FdSet {
    /// Entries are put in canonical order: `(|lhs|, lhs, rhs)`.
    pub fn new(
        name: impl Into<String>,
        table: impl Into<String>,
        fingerprint: u64,
        attributes: Vec<String>,
        mined_at: impl Into<String>,
        mut entries: Vec<FdEntry>,
    ) -> Result<Self> {
        entries.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        if let Some(w) = entries.windows(2).find(|w| w[0].key() == w[1].key()) {
            return Err(Error::Parameter(format!("duplicate dependency {}", w[0])));
        }
        for e in &entries {
            if let Some(a) = e
                .lhs
                .iter()
                .chain([&e.rhs])
                .find(|a| !attributes.contains(a))
            {
                return Err(Error::UnknownAttribute(a.clone()));
            }
        }
        Ok(FdSet {
            name: name.into(),
            table: table.into(),
            fingerprint,
            attributes,
            mined_at: mined_at.into(),
            entries,
        })
    }

    /// An FD set bound to the current snapshot of `relation`.
    pub fn for_relation(
        name: impl Into<String>,
        relation: &Relation,
        mined_at: impl Into<String>,
        entries: Vec<FdEntry>,
    ) -> Result<Self> {
        FdSet::new(
            name,
            relation.name(),
            relation.fingerprint(),
            relation.attribute_names().into_iter().collect(),
            mined_at,
            entries,
        )
    }

    pub fn entries(&self) -> &[FdEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, lhs: &[String], rhs: &str) -> Option<&FdEntry> {
        self.entries.iter().find(|e| e.lhs == lhs && e.rhs == rhs)
    }

    /// True when `relation` is no longer the snapshot this set was built on.
    pub fn is_stale(&self, relation: &Relation) -> bool {
        relation.name() != self.table || relation.fingerprint() != self.fingerprint
    }

    pub fn has_approximate(&self) -> bool {
        self.entries.iter().any(|e| !e.is_exact())
    }

    pub fn renamed(&self, name: impl Into<String>) -> FdSet {
        FdSet {
            name: name.into(),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FdDiff {
    pub added: Vec<FdEntry>,
    pub removed: Vec<FdEntry>,
    /// `(old, new)` for keys present in both with different errors.
    pub error_changed: Vec<(FdEntry, FdEntry)>,
}

impl FdDiff {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty() && self.error_changed.is_empty()
    }
}

pub const DIFF_TOLERANCE: f64 = 1e-12;

pub fn diff_fdsets(old: &FdSet, new: &FdSet) -> Result<FdDiff> {
    if old.table != new.table {
        return Err(Error::Contract(format!(
            "cannot diff FD sets of different tables (\"{}\" vs \"{}\")",
            old.table, new.table
        )));
    }
    let index = |fs: &FdSet| -> BTreeMap<(usize, Vec<String>, String), FdEntry> {
        fs.entries
            .iter()
            .map(|e| ((e.lhs.len(), e.lhs.clone(), e.rhs.clone()), e.clone()))
            .collect()
    };
    let (a, b) = (index(old), index(new));
    let mut diff = FdDiff::default();
    for (k, e) in &b {
        match a.get(k) {
            None => diff.added.push(e.clone()),
            Some(o) if (o.error - e.error).abs() > DIFF_TOLERANCE => {
                diff.error_changed.push((o.clone(), e.clone()))
            }
            Some(_) => {}
        }
    }
    diff.removed = a
        .iter()
        .filter(|(k, _)| !b.contains_key(*k))
        .map(|(_, e)| e.clone())
        .collect();
    Ok(diff)
}
