//! Property bodies, run by proptest in the property suite and by an inline
//! runner in the acceptance target.

use std::collections::{BTreeMap, BTreeSet};

use fdq_core::fdstore::{attr_closure, parse_fdml, read_fdset, write_fdset, FdSet, FdmlQuery};
use fdq_core::miner::{
    brute_force_mine, cfd_confidence, mine_fds, parse_minefd, Cfd, MineStatement, MiningSpec,
};
use fdq_core::partition::{error_measure, fd_holds, violating_rows, FdCandidate};
use fdq_core::query::{
    condition_to_tableau, eval_dependent, eval_holds, eval_not_holds, eval_violates,
    parse_extended_select, ExtendedSelect,
};
use fdq_core::relation::{eval_row_predicate, RowPredicate};
use fdq_core::{Relation, RowSet};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use super::{pairwise_error, pairwise_violations, violates_oracle};

type Outcome = Result<(), TestCaseError>;

fn lhs_names(r: &Relation, c: &FdCandidate) -> Vec<String> {
    c.lhs.iter().map(|&a| r.attr_name(a).to_string()).collect()
}

fn scope_rows(r: &Relation, on: Option<&RowPredicate>) -> RowSet {
    match on {
        Some(p) => eval_row_predicate(r, p).unwrap(),
        None => RowSet::all(r.len()),
    }
}

/// HOLDS and NOT HOLDS split the scope into two disjoint parts.
pub fn holds_partitions_scope(
    (r, c, on): (Relation, FdCandidate, Option<RowPredicate>),
) -> Outcome {
    let lhs = lhs_names(&r, &c);
    let rhs = r.attr_name(c.rhs);
    let kept = eval_holds(&r, &lhs, rhs, on.as_ref(), None).unwrap();
    let dropped = eval_not_holds(&r, &lhs, rhs, on.as_ref()).unwrap();
    prop_assert!(kept.intersect(&dropped).is_empty());
    prop_assert_eq!(kept.union(&dropped), scope_rows(&r, on.as_ref()));
    Ok(())
}

/// The rows HOLDS keeps satisfy the dependency, so applying it again keeps
/// all of them.
pub fn holds_is_idempotent((r, c, on): (Relation, FdCandidate, Option<RowPredicate>)) -> Outcome {
    let lhs = lhs_names(&r, &c);
    let rhs = r.attr_name(c.rhs);
    let kept = eval_holds(&r, &lhs, rhs, on.as_ref(), None).unwrap();
    let sub = r.select_rows(&kept);
    let again = eval_holds(&sub, &lhs, rhs, on.as_ref(), None).unwrap();
    prop_assert_eq!(again, RowSet::all(sub.len()));
    prop_assert!(fd_holds(&sub, &c, &RowSet::all(sub.len())));
    Ok(())
}

/// Adding attributes to the left side never raises the error.
pub fn error_is_monotone((r, c, extra): (Relation, FdCandidate, usize)) -> Outcome {
    let extra = extra % r.arity();
    prop_assume!(extra != c.rhs && !r.is_empty());
    let mut grown = c.lhs.clone();
    grown.push(extra);
    let grown = FdCandidate::new(grown, c.rhs);
    let all = RowSet::all(r.len());
    let small = error_measure(&r, &c, &all).unwrap();
    let large = error_measure(&r, &grown, &all).unwrap();
    prop_assert!(
        large <= small,
        "{:?}: {} > {:?}: {}",
        grown,
        large,
        c,
        small
    );
    Ok(())
}

/// Partition-based validation agrees with pairwise comparison, on the
/// whole table and on a row subset.
pub fn validation_matches_pairwise((r, c, pick): (Relation, FdCandidate, Vec<bool>)) -> Outcome {
    let all: Vec<usize> = (0..r.len()).collect();
    let some: Vec<usize> = all
        .iter()
        .copied()
        .filter(|&i| pick.get(i).copied().unwrap_or(true))
        .collect();
    for scope in [all, some] {
        let set: RowSet = scope.iter().copied().collect();
        let violations = pairwise_violations(&r, &c, &scope);
        prop_assert_eq!(fd_holds(&r, &c, &set), violations == 0);
        if !scope.is_empty() {
            prop_assert_eq!(
                error_measure(&r, &c, &set).unwrap(),
                pairwise_error(&r, &c, &scope)
            );
        }
        let rows = violating_rows(&r, &c, &set);
        let expected: RowSet = scope
            .iter()
            .copied()
            .filter(|&i| {
                scope.iter().any(|&j| {
                    c.lhs.iter().all(|&a| r.value(i, a) == r.value(j, a))
                        && r.value(i, c.rhs) != r.value(j, c.rhs)
                })
            })
            .collect();
        prop_assert_eq!(rows, expected);
    }
    Ok(())
}

fn fdset_closure(fs: &FdSet, x: &BTreeSet<String>) -> BTreeSet<String> {
    let v: Vec<&String> = x.iter().collect();
    attr_closure(&v, fs).unwrap()
}

/// Closure is extensive, monotone and idempotent.
pub fn closure_laws((fs, x, y): (FdSet, BTreeSet<String>, BTreeSet<String>)) -> Outcome {
    let cx = fdset_closure(&fs, &x);
    prop_assert!(x.is_subset(&cx));
    let xy: BTreeSet<String> = x.union(&y).cloned().collect();
    prop_assert!(cx.is_subset(&fdset_closure(&fs, &xy)));
    prop_assert_eq!(fdset_closure(&fs, &cx), cx);
    Ok(())
}

pub fn fdset_round_trip(fs: FdSet) -> Outcome {
    let mut buf = Vec::new();
    write_fdset(&fs, &mut buf).unwrap();
    let back = read_fdset(&buf[..]).unwrap();
    prop_assert_eq!(&back, &fs);
    let mut again = Vec::new();
    write_fdset(&back, &mut again).unwrap();
    prop_assert_eq!(again, buf);
    Ok(())
}

pub fn fdml_fixpoint(q: FdmlQuery) -> Outcome {
    let text = q.to_string();
    let back = parse_fdml(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
    prop_assert_eq!(&back, &q, "{}", text);
    prop_assert_eq!(back.to_string(), text);
    Ok(())
}

pub fn minefd_fixpoint(s: MineStatement) -> Outcome {
    let text = s.to_string();
    let back = parse_minefd(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
    prop_assert_eq!(&back, &s, "{}", text);
    prop_assert_eq!(back.to_string(), text);
    Ok(())
}

pub fn select_fixpoint(q: ExtendedSelect) -> Outcome {
    let text = q.to_string();
    let back =
        parse_extended_select(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
    prop_assert_eq!(&back, &q, "{}", text);
    prop_assert_eq!(back.to_string(), text);
    Ok(())
}

/// The pattern tableau of a condition selects the rows the condition does,
/// whatever attributes the tableau is built over.
pub fn tableau_is_faithful((r, p, attrs): (Relation, RowPredicate, BTreeSet<String>)) -> Outcome {
    let attrs: Vec<String> = attrs
        .into_iter()
        .filter(|a| r.attr_index(a).is_ok())
        .collect();
    let t = condition_to_tableau(&p, &attrs);
    prop_assert_eq!(
        t.matching_rows(&r).unwrap(),
        eval_row_predicate(&r, &p).unwrap()
    );
    Ok(())
}

/// DEPENDENT(X) lists the attributes that the exhaustive miner reports with
/// exactly X as left side.
pub fn dependent_matches_oracle((r, c, t): (Relation, FdCandidate, f64)) -> Outcome {
    let x = lhs_names(&r, &c);
    let got = eval_dependent(&r, &x, Some(t)).unwrap();
    let spec = MiningSpec {
        max_lhs_len: Some(x.len()),
        ..MiningSpec::approximate(t)
    };
    let mined = brute_force_mine(&r, &spec).unwrap();
    let expected: Vec<String> = (0..r.arity())
        .map(|a| r.attr_name(a).to_string())
        .filter(|a| mined.entries.iter().any(|e| e.lhs == x && &e.rhs == a))
        .collect();
    prop_assert_eq!(got, expected);
    Ok(())
}

pub fn violates_matches_oracle(
    (r, c, suspect, threshold, on): (Relation, FdCandidate, usize, f64, Option<RowPredicate>),
) -> Outcome {
    let s = c.lhs[suspect % c.lhs.len()];
    let lhs = lhs_names(&r, &c);
    let rhs = vec![r.attr_name(c.rhs).to_string()];
    let got = eval_violates(&r, r.attr_name(s), &lhs, &rhs, on.as_ref(), Some(threshold)).unwrap();
    let others: Vec<usize> = c.attributes().into_iter().filter(|&a| a != s).collect();
    let scope: Vec<usize> = scope_rows(&r, on.as_ref()).iter().collect();
    let expected: RowSet = violates_oracle(&r, s, &others, &scope, threshold)
        .into_iter()
        .collect();
    prop_assert_eq!(&got, &expected);
    // every flagged row sits in a group with at least two suspect values
    for i in got.iter() {
        let distinct: BTreeSet<String> = scope
            .iter()
            .filter(|&&j| others.iter().all(|&a| r.value(i, a) == r.value(j, a)))
            .map(|&j| format!("{:?}", r.value(j, s)))
            .collect();
        prop_assert!(distinct.len() >= 2);
    }
    Ok(())
}

fn keyed(entries: &[fdq_core::fdstore::FdEntry]) -> BTreeMap<(Vec<String>, String), u64> {
    entries
        .iter()
        .map(|e| ((e.lhs.clone(), e.rhs.clone()), e.error.to_bits()))
        .collect()
}

/// The levelwise miner and the exhaustive one report the same dependencies
/// with the same errors.
pub fn miner_matches_oracle((r, t, max_len): (Relation, f64, Option<usize>)) -> Outcome {
    let spec = MiningSpec {
        max_lhs_len: max_len,
        ..MiningSpec::approximate(t)
    };
    let fast = mine_fds(&r, &spec).unwrap();
    let slow = brute_force_mine(&r, &spec).unwrap();
    prop_assert_eq!(keyed(&fast.entries), keyed(&slow.entries));
    prop_assert_eq!(fast.entries, slow.entries);
    Ok(())
}

pub fn cfd_matches_oracle((r, cfd): (Relation, Cfd)) -> Outcome {
    let got = cfd_confidence(&r, &cfd).unwrap();
    let expected = super::cfd_confidence_oracle(&r, &cfd);
    prop_assert!((got - expected).abs() < 1e-12, "{} vs {}", got, expected);
    Ok(())
}
