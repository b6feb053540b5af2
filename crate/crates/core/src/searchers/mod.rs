//! Finite searches for the Ramsey-theoretic ingredients: extremal numbers
//! for avoidance problems on `[1..N]`, bounded multidimensional polynomial
//! van der Waerden witnesses, Folkman tuples, and Ramsey-degree subsets.

mod extremal;
mod folkman;
mod mpvdw;
mod ramsey;

use std::collections::BTreeMap;

pub use extremal::{
    brute_avoiding, largest_avoiding, pvdw_min_n, schur_number, vdw_number, verify_certificate,
    BruteResult, Engine, ExtremalCertificate, ExtremalOptions, ExtremalOutcome, Refutation,
    RefutationMethod,
};
pub use folkman::{folkman_search, folkman_search_unpruned, FolkmanOutcome, FolkmanWitness};
pub use mpvdw::{
    mpvdw_search, verify_mpvdw, GridColoring, MpvdwInstance, MpvdwOutcome, MpvdwWitness, UGrid,
};
pub use ramsey::{ramsey_degree_extract, verify_ramsey_degrees, RamseyOutcome};

use crate::arith::Rational;
use crate::error::Error;
use crate::pattern::Pattern;

/// Distinct value sets of in-range instances of `pattern` with every
/// variable in `[1..n]` and every term value in `[1..n]`, sorted.
pub fn instantiations(pattern: &Pattern, n: u32) -> Result<Vec<Vec<u32>>, Error> {
    Ok(instantiations_with_reach(pattern, n)?.into_keys().collect())
}

/// Value sets mapped to the smallest `N` at which some assignment producing
/// them lies in range (largest variable or value).
pub(crate) fn instantiations_with_reach(
    pattern: &Pattern,
    n: u32,
) -> Result<BTreeMap<Vec<u32>, u32>, Error> {
    if !pattern.is_integer_valued() {
        return Err(Error::Rejected(format!(
            "pattern {} is not integer-valued",
            pattern.name()
        )));
    }
    let arity = pattern.arity();
    let mut out = BTreeMap::new();
    if n == 0 || arity == 0 {
        return Ok(out);
    }
    let limit = Rational::from(n as i64);
    let prune = pattern.is_monotone();
    let mut assignment = vec![Rational::one(); arity];
    let mut idx = vec![1u32; arity];
    'outer: loop {
        let mut skip_pos = None;
        if pattern.admits(&assignment) {
            let values = pattern.instantiate_unchecked(&assignment);
            let mut set = Vec::with_capacity(values.len());
            let mut ok = true;
            for v in &values {
                if v > &limit {
                    ok = false;
                    break;
                }
                match v.to_i64() {
                    Some(x) if x >= 1 => set.push(x as u32),
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                set.sort_unstable();
                set.dedup();
                let reach = set
                    .last()
                    .copied()
                    .unwrap_or(0)
                    .max(*idx.iter().max().expect("arity > 0"));
                out.entry(set)
                    .and_modify(|r: &mut u32| *r = (*r).min(reach))
                    .or_insert(reach);
            } else if prune && values.iter().any(|v| v > &limit) {
                // increasing the last variable only grows values
                skip_pos = Some(arity - 1);
            }
        }
        let mut pos = match skip_pos {
            Some(p) => {
                if p == 0 {
                    break;
                }
                idx[p] = 1;
                assignment[p] = Rational::one();
                p - 1
            }
            None => arity - 1,
        };
        loop {
            if idx[pos] < n {
                idx[pos] += 1;
                assignment[pos] = Rational::from(idx[pos] as i64);
                continue 'outer;
            }
            idx[pos] = 1;
            assignment[pos] = Rational::one();
            if pos == 0 {
                break 'outer;
            }
            pos -= 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::catalog_pattern;

    fn brute_sets(p: &Pattern, n: u32) -> Vec<Vec<u32>> {
        let mut out = std::collections::BTreeSet::new();
        let arity = p.arity();
        let total = (n as u64).pow(arity as u32);
        for code in 0..total {
            let mut c = code;
            let a: Vec<Rational> = (0..arity)
                .map(|_| {
                    let v = c % n as u64 + 1;
                    c /= n as u64;
                    Rational::from(v as i64)
                })
                .collect();
            if !p.admits(&a) {
                continue;
            }
            let vals = p.instantiate(&a).unwrap();
            if vals.iter().all(|v| v.is_integer() && v.is_positive() && v.to_i64().unwrap() <= n as i64) {
                let mut s: Vec<u32> = vals.iter().map(|v| v.to_i64().unwrap() as u32).collect();
                s.sort_unstable();
                s.dedup();
                out.insert(s);
            }
        }
        out.into_iter().collect()
    }

    #[test]
    fn schur_sets_small() {
        let p = catalog_pattern("schur").unwrap();
        assert_eq!(instantiations(&p, 2).unwrap(), vec![vec![1, 2]]);
        assert_eq!(
            instantiations(&p, 4).unwrap(),
            vec![vec![1, 2], vec![1, 2, 3], vec![1, 3, 4], vec![2, 4]]
        );
    }

    #[test]
    fn pruned_enumeration_matches_brute_force() {
        for p in crate::pattern::integer_catalog() {
            for n in [1, 5, 9] {
                assert_eq!(instantiations(&p, n).unwrap(), brute_sets(&p, n), "{} n={n}", p.name());
            }
        }
    }

    #[test]
    fn reach_monotone_in_n() {
        let p = catalog_pattern("pvdw:-1,1").unwrap();
        let big = instantiations_with_reach(&p, 20).unwrap();
        for n in 1..20 {
            let small: Vec<Vec<u32>> = big
                .iter()
                .filter(|(_, &r)| r <= n)
                .map(|(s, _)| s.clone())
                .collect();
            assert_eq!(small, instantiations(&p, n).unwrap(), "n={n}");
        }
    }
}
