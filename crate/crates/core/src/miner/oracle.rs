use std::collections::HashMap;

use super::{entry, finish, universe, MinedFds, MiningSpec};
use crate::error::{Error, Result};
use crate::relation::Relation;

/// Exhaustive reference miner for small tables: every left side up to the
/// length bound is checked by direct pairwise comparison, and only minimal
/// ones are kept. Filter and minimality rules are those of `mine_fds`.
pub fn brute_force_mine(relation: &Relation, spec: &MiningSpec) -> Result<MinedFds> {
    let u = universe(relation, spec)?;
    if u.lhs.len() > 20 {
        return Err(Error::Unsupported(
            "exhaustive mining is limited to 20 left-side attributes".into(),
        ));
    }
    let n = relation.len();
    let rows = relation.rows();

    // agree set of every unordered pair, as a mask over schema positions
    let mut agree: HashMap<u64, u64> = HashMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let mask = (0..relation.arity())
                .filter(|&a| rows[i][a] == rows[j][a])
                .fold(0u64, |m, a| m | (1 << a));
            *agree.entry(mask).or_default() += 2;
        }
    }
    let error = |lhs: u64, rhs: usize| -> f64 {
        if n <= 1 {
            return 0.0;
        }
        let violating: u64 = agree
            .iter()
            .filter(|(m, _)| *m & lhs == lhs && *m & (1 << rhs) == 0)
            .map(|(_, c)| c)
            .sum();
        violating as f64 / (n * n - n) as f64
    };

    let k = u.lhs.len();
    let max_len = spec.max_lhs_len.unwrap_or(k).min(k);
    let to_schema = |local: u32| -> (u64, Vec<usize>) {
        let attrs: Vec<usize> = (0..k)
            .filter(|b| local & (1 << b) != 0)
            .map(|b| u.lhs[b])
            .collect();
        (attrs.iter().fold(0u64, |m, &a| m | (1 << a)), attrs)
    };

    let mut within: HashMap<(u32, usize), f64> = HashMap::new();
    for local in 1u32..(1u32 << k) {
        if local.count_ones() as usize > max_len {
            continue;
        }
        let (mask, _) = to_schema(local);
        for &a in &u.rhs {
            if mask & (1 << a) == 0 {
                let e = error(mask, a);
                if e <= spec.error_threshold {
                    within.insert((local, a), e);
                }
            }
        }
    }

    let mut out = Vec::new();
    for (&(local, a), &e) in &within {
        let len = local.count_ones() as usize;
        if len < spec.min_lhs_len {
            continue;
        }
        // proper non-empty subsets
        let mut sub = (local - 1) & local;
        let mut minimal = true;
        while sub != 0 {
            if within.contains_key(&(sub, a)) {
                minimal = false;
                break;
            }
            sub = (sub - 1) & local;
        }
        if minimal {
            out.push(entry(relation, &to_schema(local).1, a, e));
        }
    }
    Ok(finish(out, u.warnings))
}
