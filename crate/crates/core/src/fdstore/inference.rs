//! Armstrong-axiom reasoning over the exact entries of an FD set.

use std::fmt;

use super::{AttrNames, FdEntry, FdSet, Origin};
use crate::error::{Error, Result};

fn check_names<'a>(fs: &FdSet, names: impl IntoIterator<Item = &'a String>) -> Result<()> {
    for n in names {
        if !fs.attributes.contains(n) {
            return Err(Error::UnknownAttribute(n.clone()));
        }
    }
    Ok(())
}

fn closure_over<'a>(x: &AttrNames, deps: impl Iterator<Item = &'a FdEntry> + Clone) -> AttrNames {
    let mut out = x.clone();
    loop {
        let before = out.len();
        for e in deps.clone() {
            if !out.contains(&e.rhs) && e.lhs.iter().all(|a| out.contains(a)) {
                out.insert(e.rhs.clone());
            }
        }
        if out.len() == before {
            return out;
        }
    }
}

/// Smallest superset of `x` closed under the exact dependencies of `fs`.
pub fn attr_closure<S: AsRef<str>>(x: &[S], fs: &FdSet) -> Result<AttrNames> {
    let x: AttrNames = x.iter().map(|s| s.as_ref().to_owned()).collect();
    check_names(fs, &x)?;
    Ok(closure_over(
        &x,
        fs.entries().iter().filter(|e| e.is_exact()),
    ))
}

pub fn is_implied(fd: &FdEntry, fs: &FdSet) -> Result<bool> {
    if !fd.is_exact() {
        return Err(Error::Unsupported(
            "inference is defined for exact dependencies only".into(),
        ));
    }
    check_names(fs, fd.lhs.iter().chain([&fd.rhs]))?;
    Ok(attr_closure(&fd.lhs, fs)?.contains(&fd.rhs))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ImportFinding {
    /// Follows from the other exact entries.
    Redundant(FdEntry),
    /// Still holds after dropping the listed left-side attributes.
    NonMinimal {
        entry: FdEntry,
        removable: Vec<String>,
    },
}

impl fmt::Display for ImportFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImportFinding::Redundant(e) => {
                write!(f, "redundant: {e} follows from the other entries")
            }
            ImportFinding::NonMinimal { entry, removable } => write!(
                f,
                "not minimal: {entry} still holds without {}",
                removable.join(", ")
            ),
        }
    }
}

/// Checks every exact imported entry against the rest of the set: is it
/// derivable from the others, and can its left side shrink?
pub fn check_imported(fs: &FdSet) -> Vec<ImportFinding> {
    let exact: Vec<&FdEntry> = fs.entries().iter().filter(|e| e.is_exact()).collect();
    let mut findings = Vec::new();
    for (i, e) in exact.iter().enumerate() {
        if e.origin != Origin::Imported {
            continue;
        }
        let lhs: AttrNames = e.lhs.iter().cloned().collect();
        let others = exact
            .iter()
            .enumerate()
            .filter(move |(j, _)| *j != i)
            .map(|(_, d)| *d);
        if closure_over(&lhs, others).contains(&e.rhs) {
            findings.push(ImportFinding::Redundant((*e).clone()));
            continue;
        }
        let all = exact.iter().copied();
        let removable: Vec<String> = e
            .lhs
            .iter()
            .filter(|a| {
                let mut reduced = lhs.clone();
                reduced.remove(*a);
                closure_over(&reduced, all.clone()).contains(&e.rhs)
            })
            .cloned()
            .collect();
        if !removable.is_empty() {
            findings.push(ImportFinding::NonMinimal {
                entry: (*e).clone(),
                removable,
            });
        }
    }
    findings
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(entries: Vec<FdEntry>) -> FdSet {
        let attrs = ["A", "B", "C", "D"].map(String::from).to_vec();
        FdSet::new("fs", "t", 0, attrs, "", entries).unwrap()
    }

    #[test]
    fn transitive_closure() {
        let s = fs(vec![FdEntry::exact(["A"], "B"), FdEntry::exact(["B"], "C")]);
        let c = attr_closure(&["A"], &s).unwrap();
        assert_eq!(c, AttrNames::from(["A", "B", "C"].map(String::from)));
        assert!(is_implied(&FdEntry::exact(["A"], "C"), &s).unwrap());
        assert!(!is_implied(&FdEntry::exact(["C"], "A"), &s).unwrap());
        assert_eq!(attr_closure(&["D"], &fs(vec![])).unwrap().len(), 1);
    }

    #[test]
    fn approximate_entries_do_not_propagate() {
        let s = fs(vec![FdEntry::new(["A"], "B", 0.1, Origin::Mined).unwrap()]);
        assert!(!attr_closure(&["A"], &s).unwrap().contains("B"));
        let afd = FdEntry::new(["A"], "B", 0.1, Origin::Mined).unwrap();
        assert!(matches!(is_implied(&afd, &s), Err(Error::Unsupported(_))));
        assert!(matches!(
            attr_closure(&["Z"], &s),
            Err(Error::UnknownAttribute(_))
        ));
    }

    #[test]
    fn imported_findings() {
        let imported = |l: &[&str], r: &str| {
            FdEntry::new(l.iter().copied(), r, 0.0, Origin::Imported).unwrap()
        };
        let s = fs(vec![
            FdEntry::exact(["A"], "B"),
            FdEntry::exact(["B"], "C"),
            imported(&["A"], "C"),
            imported(&["B", "D"], "A"),
            imported(&["A", "D"], "B"),
        ]);
        let found = check_imported(&s);
        assert!(found.contains(&ImportFinding::Redundant(imported(&["A"], "C"))));
        assert!(found.contains(&ImportFinding::Redundant(imported(&["A", "D"], "B"))));
        assert!(!found
            .iter()
            .any(|f| matches!(f, ImportFinding::Redundant(e) if e.rhs == "A")));
    }
}
