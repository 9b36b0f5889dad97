//! Generators and reference implementations shared by the property suite
//! and the acceptance runner.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::path::PathBuf;

use fdq_core::fdstore::{
    FdEntry, FdSet, FdmlCondition, FdmlProjection, FdmlQuery, LhsConstruct, Origin, SubsetExpr,
};
use fdq_core::miner::{Cfd, MineStatement};
use fdq_core::partition::FdCandidate;
use fdq_core::query::{
    value_distance, Condition, ExtendedSelect, FdPredicate, FdPredicateKind, PatternCell,
    PatternTableau, Projection,
};
use fdq_core::relation::{load_csv, CmpOp, CsvOptions, Kind, RowPredicate};
use fdq_core::{Relation, Value};
use proptest::prelude::*;
use rand::Rng;
use rust_decimal::Decimal;

pub mod props;

pub fn fixture(file: &str, name: &str) -> Relation {
    let path = fixture_dir().join(file);
    load_csv(File::open(path).unwrap(), &CsvOptions::named(name)).unwrap()
}

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn names(arity: usize) -> Vec<String> {
    (0..arity).map(|i| format!("a{i}")).collect()
}

/// Integer columns named `a0..`; a cell is null when drawn as `domain`.
pub fn build_relation(arity: usize, cells: Vec<Vec<i64>>, domain: i64) -> Relation {
    let columns = names(arity)
        .into_iter()
        .map(|n| (n, Kind::Integer))
        .collect();
    let rows = cells
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|v| {
                    if v == domain {
                        Value::Null
                    } else {
                        Value::Integer(v)
                    }
                })
                .collect()
        })
        .collect();
    Relation::new("r", columns, rows).unwrap()
}

pub fn arb_relation(max_arity: usize, max_rows: usize) -> impl Strategy<Value = Relation> {
    (1..=max_arity, 0..=max_rows, 2i64..=4).prop_flat_map(|(arity, n, domain)| {
        // one extra value in the range stands for null
        let cell = prop_oneof![9 => 0..domain, 1 => Just(domain)];
        proptest::collection::vec(proptest::collection::vec(cell, arity), n)
            .prop_map(move |cells| build_relation(arity, cells, domain))
    })
}

/// Seeded relation for the oracle sweep: every cell drawn from `0..domain`.
pub fn random_relation(rng: &mut impl Rng, max_arity: usize, max_rows: usize) -> Relation {
    let arity = rng.gen_range(1..=max_arity);
    let n = rng.gen_range(0..=max_rows);
    let domain = rng.gen_range(2..=5);
    let cells = (0..n)
        .map(|_| (0..arity).map(|_| rng.gen_range(0..domain)).collect())
        .collect();
    build_relation(arity, cells, i64::MAX)
}

/// A relation with a dependency candidate over its schema.
pub fn arb_candidate(
    max_arity: usize,
    max_rows: usize,
) -> impl Strategy<Value = (Relation, FdCandidate)> {
    arb_relation(max_arity.max(2), max_rows)
        .prop_filter("needs two attributes", |r| r.arity() >= 2)
        .prop_flat_map(|r| {
            let k = r.arity();
            (Just(r), 0..k, proptest::collection::vec(any::<bool>(), k))
        })
        .prop_filter_map("non-empty left side", |(r, rhs, pick)| {
            let lhs: Vec<usize> = (0..r.arity()).filter(|&a| a != rhs && pick[a]).collect();
            (!lhs.is_empty()).then(|| (r, FdCandidate::new(lhs, rhs)))
        })
}

/// A candidate together with an optional ON condition over its table.
pub fn arb_scoped_candidate(
    max_arity: usize,
    max_rows: usize,
) -> impl Strategy<Value = (Relation, FdCandidate, Option<RowPredicate>)> {
    arb_candidate(max_arity, max_rows).prop_flat_map(|(r, c)| {
        let p = proptest::option::of(arb_row_predicate(r.attribute_names()));
        (Just(r), Just(c), p)
    })
}

pub fn arb_op() -> impl Strategy<Value = CmpOp> {
    proptest::sample::select(CmpOp::ALL.to_vec())
}

/// Row predicates over `attrs` with small integer constants.
pub fn arb_row_predicate(attrs: Vec<String>) -> impl Strategy<Value = RowPredicate> {
    let leaf = prop_oneof![
        8 => (proptest::sample::select(attrs), arb_op(), -1i64..5)
            .prop_map(|(a, op, v)| RowPredicate::compare(a, op, Value::Integer(v))),
        1 => Just(RowPredicate::always()),
        1 => Just(RowPredicate::never()),
    ];
    row_tree(leaf.boxed())
}

fn row_tree(leaf: BoxedStrategy<RowPredicate>) -> impl Strategy<Value = RowPredicate> {
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(RowPredicate::And),
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(RowPredicate::Or),
            inner.prop_map(|p| RowPredicate::Not(Box::new(p))),
        ]
    })
}

/// Attribute names that need quoting or look like keywords.
pub const NAME_POOL: [&str; 6] = ["Zip", "b c", "q\"t", "ERROR", "HOLDS", "x_1"];

pub fn arb_name() -> impl Strategy<Value = String> {
    proptest::sample::select(NAME_POOL.to_vec()).prop_map(String::from)
}

fn arb_names(max: usize) -> impl Strategy<Value = Vec<String>> {
    proptest::collection::vec(arb_name(), 1..=max)
}

/// Decimals always carry a non-zero fraction so they print with a point.
pub fn arb_literal() -> impl Strategy<Value = Value> {
    prop_oneof![
        (-50i64..50).prop_map(Value::Integer),
        (-999i64..999, 1u32..=3)
            .prop_filter("fractional", |(m, s)| m % 10i64.pow(*s) != 0)
            .prop_map(|(m, s)| Value::decimal(Decimal::new(m, s))),
        proptest::sample::select(vec!["", "it's", "x y", "SCOTCH", "a\"b"]).prop_map(Value::text),
    ]
}

pub fn arb_syntax_row_predicate() -> impl Strategy<Value = RowPredicate> {
    let leaf = prop_oneof![
        8 => (arb_name(), arb_op(), arb_literal())
            .prop_map(|(a, op, v)| RowPredicate::compare(a, op, v)),
        1 => Just(RowPredicate::always()),
        1 => Just(RowPredicate::never()),
    ];
    row_tree(leaf.boxed())
}

/// A real that prints and parses back exactly.
pub fn arb_fraction() -> impl Strategy<Value = f64> {
    (0u32..100).prop_map(|k| f64::from(k) / 100.0)
}

fn arb_glob() -> impl Strategy<Value = String> {
    proptest::sample::select(vec!["Zip", "*Sold", "Cat?gory", "b c", "*", "q\"t"])
        .prop_map(String::from)
}

pub fn arb_subset() -> impl Strategy<Value = SubsetExpr> {
    let leaf = prop_oneof![
        4 => proptest::collection::vec(arb_glob(), 0..=3).prop_map(SubsetExpr::Globs),
        1 => Just(SubsetExpr::Star),
    ];
    leaf.prop_recursive(3, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SubsetExpr::union(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| SubsetExpr::diff(a, b)),
        ]
    })
}

pub fn arb_lhs_construct() -> impl Strategy<Value = LhsConstruct> {
    let leaf = prop_oneof![
        3 => proptest::collection::vec(arb_glob(), 0..=3).prop_map(LhsConstruct::Globs),
        1 => arb_subset().prop_map(LhsConstruct::AllOf),
        1 => arb_subset().prop_map(LhsConstruct::AnyOf),
        1 => Just(LhsConstruct::Star),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| LhsConstruct::union(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| LhsConstruct::diff(a, b)),
        ]
    })
}

fn error_atoms(c: &FdmlCondition) -> usize {
    match c {
        FdmlCondition::ErrorLeq(_) => 1,
        FdmlCondition::And(v) => v.iter().map(error_atoms).sum(),
        FdmlCondition::Or(v) => v.iter().map(error_atoms).max().unwrap_or(0),
        _ => 0,
    }
}

/// FDML queries in the shape the parser produces: n-ary nodes have at
/// least two children and no conjunction carries two ERROR atoms.
pub fn arb_fdml() -> impl Strategy<Value = FdmlQuery> {
    let leaf = prop_oneof![
        arb_lhs_construct().prop_map(FdmlCondition::LhsLike),
        arb_subset().prop_map(FdmlCondition::RhsLike),
        (arb_op(), 0usize..5).prop_map(|(op, k)| FdmlCondition::LhsLength(op, k)),
        arb_fraction().prop_map(FdmlCondition::ErrorLeq),
    ];
    let cond = leaf
        .prop_recursive(3, 10, 3, |inner| {
            prop_oneof![
                proptest::collection::vec(inner.clone(), 2..=3).prop_map(FdmlCondition::And),
                proptest::collection::vec(inner, 2..=3).prop_map(FdmlCondition::Or),
            ]
        })
        .prop_filter("one ERROR per conjunction", |c| error_atoms(c) <= 1);
    (
        prop_oneof![Just(FdmlProjection::Star), Just(FdmlProjection::LhsRhs)],
        arb_name(),
        proptest::option::of(cond),
    )
        .prop_map(|(projection, source, filter)| FdmlQuery {
            projection,
            source,
            filter,
        })
}

pub fn arb_minefd() -> impl Strategy<Value = MineStatement> {
    (
        arb_name(),
        arb_name(),
        proptest::option::of(arb_subset()),
        proptest::option::of(arb_subset()),
        proptest::collection::vec((arb_op(), 0usize..5), 0..=2),
        proptest::option::of(arb_fraction()),
        any::<bool>(),
    )
        .prop_map(
            |(target, table, lhs_filter, rhs_filter, lhs_length, error_threshold, show_error)| {
                MineStatement {
                    target,
                    table,
                    lhs_filter,
                    rhs_filter,
                    lhs_length,
                    error_threshold,
                    show_error,
                }
            },
        )
}

fn arb_fd_predicate() -> impl Strategy<Value = FdPredicate> {
    let on = proptest::option::of(arb_syntax_row_predicate().boxed());
    prop_oneof![
        (
            arb_names(3),
            arb_name(),
            on.clone(),
            proptest::option::of(arb_fraction())
        )
            .prop_map(|(lhs, rhs, on, error)| FdPredicate {
                kind: FdPredicateKind::Holds,
                lhs,
                rhs: vec![rhs],
                on,
                error,
            }),
        (arb_names(3), arb_name(), on.clone()).prop_map(|(lhs, rhs, on)| FdPredicate {
            kind: FdPredicateKind::NotHolds,
            lhs,
            rhs: vec![rhs],
            on,
            error: None,
        }),
        (
            arb_name(),
            arb_names(3),
            arb_names(3),
            on,
            proptest::option::of(arb_fraction())
        )
            .prop_map(|(suspect, lhs, rhs, on, error)| FdPredicate {
                kind: FdPredicateKind::Violates { suspect },
                lhs,
                rhs,
                on,
                error,
            }),
    ]
}

fn is_row(c: &Condition) -> bool {
    matches!(c, Condition::Row(_))
}

/// Conditions in the shape the parser produces: row-only subtrees are
/// folded into a single row predicate.
pub fn arb_condition() -> impl Strategy<Value = Condition> {
    let leaf = prop_oneof![
        arb_syntax_row_predicate().prop_map(Condition::Row),
        arb_fd_predicate().prop_map(Condition::Fd),
    ];
    leaf.prop_recursive(3, 10, 3, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 2..=3)
                .prop_filter("not all row", |v| !v.iter().all(is_row))
                .prop_map(Condition::And),
            proptest::collection::vec(inner.clone(), 2..=3)
                .prop_filter("not all row", |v| !v.iter().all(is_row))
                .prop_map(Condition::Or),
            inner
                .prop_filter("row negation folds", |c| !is_row(c))
                .prop_map(|c| Condition::Not(Box::new(c))),
        ]
    })
}

pub fn arb_select() -> impl Strategy<Value = ExtendedSelect> {
    let projection = prop_oneof![
        Just(Projection::Star),
        arb_names(3).prop_map(Projection::Attributes),
        (arb_names(3), proptest::option::of(arb_fraction()))
            .prop_map(|(on, error)| Projection::Dependent { on, error }),
    ];
    (
        projection,
        arb_name(),
        proptest::option::of(arb_condition()),
    )
        .prop_map(|(projection, source, filter)| ExtendedSelect {
            projection,
            source,
            filter,
        })
}

/// FD sets over `a0..a5`; approximate entries carry arbitrary errors.
pub fn arb_fdset() -> impl Strategy<Value = FdSet> {
    let entry = (
        1u8..64,
        0usize..6,
        prop_oneof![Just(0.0), 0.0f64..1.0],
        any::<bool>(),
    );
    (
        "[a-zA-Z0-9 \"'_-]{1,10}",
        "[a-zA-Z0-9_]{1,8}",
        any::<u64>(),
        "[0-9TZ:-]{0,20}",
        proptest::collection::vec(entry, 0..12),
    )
        .prop_map(|(name, table, fp, mined_at, raw)| {
            let attrs = names(6);
            let mut by_key = BTreeMap::new();
            for (mask, rhs, error, imported) in raw {
                let lhs: Vec<String> = (0..6)
                    .filter(|&a| a != rhs && mask & (1 << a) != 0)
                    .map(|a| attrs[a].clone())
                    .collect();
                if lhs.is_empty() {
                    continue;
                }
                let origin = if imported {
                    Origin::Imported
                } else {
                    Origin::Mined
                };
                let e = FdEntry::new(lhs.clone(), attrs[rhs].clone(), error, origin).unwrap();
                by_key.insert((lhs, rhs), e);
            }
            FdSet::new(
                name,
                table,
                fp,
                attrs,
                mined_at,
                by_key.into_values().collect(),
            )
            .unwrap()
        })
}

pub fn arb_attr_subset(arity: usize) -> impl Strategy<Value = BTreeSet<String>> {
    proptest::collection::btree_set(0..arity, 0..=arity)
        .prop_map(move |s| s.into_iter().map(|i| format!("a{i}")).collect())
}

/// Ordered pairs `(i, j)`, `i != j`, that agree on the left side and differ
/// on the right, checked one by one.
pub fn pairwise_violations(r: &Relation, c: &FdCandidate, scope: &[usize]) -> u64 {
    let mut count = 0;
    for &i in scope {
        for &j in scope {
            if i != j
                && c.lhs.iter().all(|&a| r.value(i, a) == r.value(j, a))
                && r.value(i, c.rhs) != r.value(j, c.rhs)
            {
                count += 1;
            }
        }
    }
    count
}

pub fn pairwise_error(r: &Relation, c: &FdCandidate, scope: &[usize]) -> f64 {
    let n = scope.len() as u64;
    if n <= 1 {
        return 0.0;
    }
    pairwise_violations(r, c, scope) as f64 / (n * n - n) as f64
}

/// Rows of `scope` whose suspect value lies within `threshold` of a
/// different suspect value among the rows agreeing on the other attributes.
pub fn violates_oracle(
    r: &Relation,
    suspect: usize,
    others: &[usize],
    scope: &[usize],
    threshold: f64,
) -> Vec<usize> {
    scope
        .iter()
        .copied()
        .filter(|&i| {
            scope.iter().any(|&j| {
                others.iter().all(|&a| r.value(i, a) == r.value(j, a))
                    && r.value(i, suspect) != r.value(j, suspect)
                    && value_distance(r.value(i, suspect), r.value(j, suspect)) <= threshold
            })
        })
        .collect()
}

/// Largest sub-instance satisfying the CFD, by trying every subset of rows.
/// Only for small tables.
pub fn cfd_confidence_oracle(r: &Relation, cfd: &Cfd) -> f64 {
    let n = r.len();
    if n == 0 {
        return 1.0;
    }
    let attrs: Vec<usize> = cfd
        .tableau
        .attributes
        .iter()
        .map(|a| r.attr_index(a).unwrap())
        .collect();
    let cell = |k: usize, attr: usize| -> Option<&PatternCell> {
        attrs
            .iter()
            .position(|&a| a == attr)
            .map(|p| &cfd.tableau.rows[k].cells[p])
    };
    let applies = |k: usize, row: usize| {
        cfd.fd
            .lhs
            .iter()
            .all(|&a| cell(k, a).is_none_or(|c| c.matches(r.value(row, a))))
    };
    let rhs_ok = |k: usize, row: usize| {
        cell(k, cfd.fd.rhs).is_none_or(|c| c.matches(r.value(row, cfd.fd.rhs)))
    };
    let satisfies = |rows: &[usize]| {
        for k in 0..cfd.tableau.rows.len() {
            for &i in rows {
                if !applies(k, i) {
                    continue;
                }
                if !rhs_ok(k, i) {
                    return false;
                }
                for &j in rows {
                    if cfd.fd.lhs.iter().all(|&a| r.value(i, a) == r.value(j, a))
                        && r.value(i, cfd.fd.rhs) != r.value(j, cfd.fd.rhs)
                    {
                        return false;
                    }
                }
            }
        }
        true
    };
    let best = (0u32..1 << n)
        .filter(|&m| {
            let rows: Vec<usize> = (0..n).filter(|&i| m & (1 << i) != 0).collect();
            satisfies(&rows)
        })
        .map(u32::count_ones)
        .max()
        .unwrap_or(0);
    f64::from(best) / n as f64
}

/// A CFD on `r` whose tableau constrains only left-side and right-side
/// attributes, with constants drawn from the column domains.
pub fn arb_cfd_instance() -> impl Strategy<Value = (Relation, Cfd)> {
    (2usize..=4, 0usize..=6, 2i64..=3)
        .prop_flat_map(|(arity, n, domain)| {
            let cells = proptest::collection::vec(proptest::collection::vec(0..domain, arity), n);
            let cell = prop_oneof![
                3 => Just(None),
                2 => (arb_op(), 0..domain).prop_map(Some),
            ];
            let tableau = proptest::collection::vec(proptest::collection::vec(cell, arity), 1..=3);
            (
                Just(arity),
                cells,
                0..arity,
                proptest::collection::vec(any::<bool>(), arity),
                tableau,
            )
                .prop_map(move |(arity, cells, rhs, pick, tableau)| {
                    (build_relation(arity, cells, i64::MAX), rhs, pick, tableau)
                })
        })
        .prop_filter_map("non-empty left side", |(r, rhs, pick, tableau)| {
            let lhs: Vec<usize> = (0..r.arity()).filter(|&a| a != rhs && pick[a]).collect();
            if lhs.is_empty() {
                return None;
            }
            let fd = FdCandidate::new(lhs, rhs);
            let attrs = fd.attributes();
            let rows = tableau
                .into_iter()
                .map(|row| {
                    attrs
                        .iter()
                        .map(|&a| match row[a] {
                            None => PatternCell::wildcard(),
                            Some((op, v)) => PatternCell::with(op, Value::Integer(v)),
                        })
                        .collect()
                })
                .collect();
            let names = attrs.iter().map(|&a| r.attr_name(a).to_string()).collect();
            let tableau = PatternTableau::from_rows(names, rows);
            Some((r, Cfd { fd, tableau }))
        })
}
