//! Tuples `x_1 ≤ ... ≤ x_n` whose nonempty subset sums share one color.

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::coloring::{ColorId, Coloring};
use crate::error::Error;
use crate::pattern::{catalog_pattern, is_monochromatic};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FolkmanWitness {
    pub xs: Vec<i64>,
    pub color: ColorId,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum FolkmanOutcome {
    Found(FolkmanWitness),
    Exhausted { nodes: u64, capped: bool },
}

impl FolkmanOutcome {
    pub fn witness(&self) -> Option<&FolkmanWitness> {
        match self {
            FolkmanOutcome::Found(w) => Some(w),
            FolkmanOutcome::Exhausted { .. } => None,
        }
    }
}

struct Params<'a> {
    coloring: &'a Coloring,
    n: usize,
    max_sum: i64,
    distinct: bool,
    node_cap: u64,
    prune: bool,
}

struct State {
    xs: Vec<i64>,
    sums: Vec<i64>,
    color: Option<ColorId>,
    nodes: u64,
    capped: bool,
}

fn color_of(c: &Coloring, v: i64) -> Result<Option<ColorId>, Error> {
    match c.color_int(v) {
        Ok(col) => Ok(Some(col)),
        Err(crate::error::ColoringError::OutOfDomain { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// True when all of `values` have color `target` (set from the first one
/// when `None`).
fn all_same(c: &Coloring, values: &[i64], target: &mut Option<ColorId>) -> Result<bool, Error> {
    for &v in values {
        let Some(col) = color_of(c, v)? else {
            return Ok(false);
        };
        match target {
            None => *target = Some(col),
            Some(t) if *t != col => return Ok(false),
            _ => {}
        }
    }
    Ok(true)
}

fn dfs(p: &Params, st: &mut State) -> Result<bool, Error> {
    let depth = st.xs.len();
    if depth == p.n {
        if p.prune {
            return Ok(true);
        }
        let mut target = None;
        return all_same(p.coloring, &st.sums, &mut target).map(|ok| {
            if ok {
                st.color = target;
            }
            ok
        });
    }
    let total: i64 = st.xs.iter().sum();
    let remaining = (p.n - depth) as i64;
    let lo = match st.xs.last() {
        Some(&x) if p.distinct => x + 1,
        Some(&x) => x,
        None => 1,
    };
    let mut x = lo;
    loop {
        // the remaining entries are at least x (x + 1, ... when distinct)
        let rest_min = if p.distinct {
            remaining * x + remaining * (remaining - 1) / 2
        } else {
            remaining * x
        };
        if total + rest_min > p.max_sum {
            return Ok(false);
        }
        st.nodes += 1;
        if st.nodes > p.node_cap {
            st.capped = true;
            return Ok(false);
        }
        let old_len = st.sums.len();
        let new: Vec<i64> = std::iter::once(x)
            .chain(st.sums.iter().map(|s| s + x))
            .collect();
        let saved = st.color;
        let ok = !p.prune || all_same(p.coloring, &new, &mut st.color)?;
        if ok {
            st.sums.extend(new);
            st.xs.push(x);
            if dfs(p, st)? {
                return Ok(true);
            }
            st.xs.pop();
            st.sums.truncate(old_len);
        }
        st.color = saved;
        if st.capped {
            return Ok(false);
        }
        x += 1;
    }
}

fn run(p: Params) -> Result<FolkmanOutcome, Error> {
    if p.n < 2 {
        return Err(Error::Rejected("Folkman search needs n >= 2".into()));
    }
    if p.node_cap == 0 {
        return Err(Error::Rejected("node cap must be positive".into()));
    }
    let mut st = State {
        xs: Vec::new(),
        sums: Vec::new(),
        color: None,
        nodes: 0,
        capped: false,
    };
    if dfs(&p, &mut st)? {
        let w = FolkmanWitness {
            xs: st.xs,
            color: st.color.expect("witness has a color"),
            nodes: st.nodes,
        };
        verify_folkman(p.coloring, &w)?;
        Ok(FolkmanOutcome::Found(w))
    } else {
        Ok(FolkmanOutcome::Exhausted {
            nodes: st.nodes,
            capped: st.capped,
        })
    }
}

/// First tuple in lexicographic order over nondecreasing tuples (strictly
/// increasing when `distinct`) with total at most `max_sum`. Prefixes that
/// are not monochromatic are cut.
pub fn folkman_search(
    coloring: &Coloring,
    n: usize,
    max_sum: i64,
    distinct: bool,
    node_cap: u64,
) -> Result<FolkmanOutcome, Error> {
    run(Params {
        coloring,
        n,
        max_sum,
        distinct,
        node_cap,
        prune: true,
    })
}

/// Same order and answer as [`folkman_search`], checking only full tuples.
pub fn folkman_search_unpruned(
    coloring: &Coloring,
    n: usize,
    max_sum: i64,
    distinct: bool,
    node_cap: u64,
) -> Result<FolkmanOutcome, Error> {
    run(Params {
        coloring,
        n,
        max_sum,
        distinct,
        node_cap,
        prune: false,
    })
}

fn verify_folkman(c: &Coloring, w: &FolkmanWitness) -> Result<(), Error> {
    let p = catalog_pattern(&format!("folkman-{}", w.xs.len()))?;
    let a: Vec<Rational> = w.xs.iter().map(|&x| Rational::from(x)).collect();
    match is_monochromatic(c, &p, &a)? {
        Some(col) if col == w.color => Ok(()),
        _ => Err(Error::Rejected(format!("{:?} is not a Folkman witness", w.xs))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{constant_coloring, mod_coloring, seeded_random_coloring, Domain};

    #[test]
    fn spec_examples() {
        let c = constant_coloring(Domain::Naturals);
        let w = folkman_search(&c, 3, 100, false, 1 << 20).unwrap();
        assert_eq!(w.witness().unwrap().xs, vec![1, 1, 1]);
        let w = folkman_search(&c, 3, 100, true, 1 << 20).unwrap();
        assert_eq!(w.witness().unwrap().xs, vec![1, 2, 3]);
        let parity = mod_coloring(2, Domain::Naturals);
        let w = folkman_search(&parity, 2, 100, true, 1 << 20).unwrap();
        assert_eq!(w.witness().unwrap().xs, vec![2, 4]);
        let w = folkman_search(&parity, 2, 100, false, 1 << 20).unwrap();
        assert_eq!(w.witness().unwrap().xs, vec![2, 2]);
    }

    #[test]
    fn pruning_is_sound() {
        for seed in 0..30 {
            let c = seeded_random_coloring(Domain::Naturals, 2, seed);
            for (n, max_sum) in [(2, 30), (3, 40)] {
                for distinct in [false, true] {
                    let a = folkman_search(&c, n, max_sum, distinct, u64::MAX).unwrap();
                    let b = folkman_search_unpruned(&c, n, max_sum, distinct, u64::MAX).unwrap();
                    assert_eq!(a.witness().map(|w| &w.xs), b.witness().map(|w| &w.xs));
                }
            }
        }
    }

    #[test]
    fn two_colorings_of_schur_range_always_have_pairs() {
        // every 2-coloring of [1..5] has a monochromatic x, y, x+y
        for code in 0..32u32 {
            let entries = (1..=5).map(|m| (Rational::from(m as i64), code >> (m - 1) & 1));
            let c = crate::coloring::table_coloring(Domain::Naturals, 2, entries, 0).unwrap();
            let w = folkman_search(&c, 2, 5, false, u64::MAX).unwrap();
            assert!(w.witness().is_some(), "coloring {code:05b}");
        }
    }

    #[test]
    fn exhaustion_and_cap() {
        let parity = mod_coloring(2, Domain::Naturals);
        let out = folkman_search(&parity, 2, 5, true, u64::MAX).unwrap();
        assert!(matches!(out, FolkmanOutcome::Exhausted { capped: false, .. }));
        let out = folkman_search(&parity, 3, 1000, true, 3).unwrap();
        assert!(matches!(out, FolkmanOutcome::Exhausted { capped: true, .. }));
        assert!(folkman_search(&parity, 1, 10, false, 10).is_err());
    }
}
