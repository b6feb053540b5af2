//! Subsets of a list on which the color of a product of `k` distinct
//! elements depends only on `k`.

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::coloring::{ColorId, Coloring};
use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum RamseyOutcome {
    Found {
        indices: Vec<usize>,
        /// Color of products of `k` elements at position `k - 1`.
        degree_colors: Vec<ColorId>,
        nodes: u64,
    },
    Exhausted {
        nodes: u64,
        capped: bool,
    },
}

struct Dfs<'a> {
    c: &'a Coloring,
    xs: &'a [Rational],
    max_degree: usize,
    target: usize,
    chosen: Vec<usize>,
    /// Products of every subset of `chosen` of size below `max_degree`,
    /// with their sizes.
    products: Vec<(usize, Rational)>,
    colors: Vec<Option<ColorId>>,
    nodes: u64,
    cap: u64,
    capped: bool,
}

impl Dfs<'_> {
    fn go(&mut self, start: usize) -> Result<bool, Error> {
        if self.chosen.len() == self.target {
            return Ok(true);
        }
        let need = self.target - self.chosen.len();
        for i in start..=self.xs.len().saturating_sub(need) {
            self.nodes += 1;
            if self.nodes > self.cap {
                self.capped = true;
                return Ok(false);
            }
            let saved = self.colors.clone();
            let mut fresh = vec![(1, self.xs[i].clone())];
            fresh.extend(
                self.products
                    .iter()
                    .filter(|(k, _)| *k < self.max_degree)
                    .map(|(k, p)| (k + 1, p * &self.xs[i])),
            );
            let mut ok = true;
            for (k, p) in &fresh {
                let col = self.c.color(p)?;
                match self.colors[k - 1] {
                    None => self.colors[k - 1] = Some(col),
                    Some(c) if c != col => {
                        ok = false;
                        break;
                    }
                    _ => {}
                }
            }
            if ok {
                let old = self.products.len();
                self.products
                    .extend(fresh.into_iter().filter(|(k, _)| *k < self.max_degree));
                self.chosen.push(i);
                if self.go(i + 1)? {
                    return Ok(true);
                }
                self.chosen.pop();
                self.products.truncate(old);
            }
            self.colors = saved;
            if self.capped {
                return Ok(false);
            }
        }
        Ok(false)
    }
}

/// First `target`-subset of indices (lexicographically) such that for each
/// `k ≤ max_degree` all products of `k` distinct selected elements share a
/// color.
pub fn ramsey_degree_extract(
    c: &Coloring,
    xs: &[Rational],
    max_degree: usize,
    target: usize,
    node_cap: u64,
) -> Result<RamseyOutcome, Error> {
    if max_degree == 0 || target == 0 {
        return Err(Error::Rejected("degree and target must be positive".into()));
    }
    let mut dfs = Dfs {
        c,
        xs,
        max_degree,
        target,
        chosen: Vec::new(),
        products: Vec::new(),
        colors: vec![None; max_degree],
        nodes: 0,
        cap: node_cap,
        capped: false,
    };
    if dfs.go(0)? {
        let degree_colors: Vec<ColorId> = dfs
            .colors
            .iter()
            .take(max_degree.min(target))
            .map(|c| c.expect("every degree up to target is seen"))
            .collect();
        verify_ramsey_degrees(c, xs, &dfs.chosen, max_degree)?;
        Ok(RamseyOutcome::Found {
            indices: dfs.chosen,
            degree_colors,
            nodes: dfs.nodes,
        })
    } else {
        Ok(RamseyOutcome::Exhausted {
            nodes: dfs.nodes,
            capped: dfs.capped,
        })
    }
}

/// Recheck a selection by enumerating every subset of size at most
/// `max_degree`.
pub fn verify_ramsey_degrees(
    c: &Coloring,
    xs: &[Rational],
    indices: &[usize],
    max_degree: usize,
) -> Result<(), Error> {
    if indices.windows(2).any(|w| w[0] >= w[1]) || indices.iter().any(|&i| i >= xs.len()) {
        return Err(Error::Rejected("indices must be increasing and in range".into()));
    }
    let mut seen: Vec<Option<ColorId>> = vec![None; max_degree];
    for mask in 1u64..1 << indices.len() {
        let k = mask.count_ones() as usize;
        if k > max_degree {
            continue;
        }
        let prod = (0..indices.len())
            .filter(|b| mask >> b & 1 == 1)
            .fold(Rational::one(), |acc, b| acc * &xs[indices[b]]);
        let col = c.color(&prod)?;
        match seen[k - 1] {
            None => seen[k - 1] = Some(col),
            Some(s) if s != col => {
                return Err(Error::Rejected(format!(
                    "products of {k} elements take two colors"
                )))
            }
            _ => {}
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{constant_coloring, mod_coloring, seeded_random_coloring, Domain};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from(x)).collect()
    }

    fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for last in k - 1..n {
            for mut c in combos(last, k - 1) {
                c.push(last);
                out.push(c);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn constant_coloring_takes_prefix() {
        let c = constant_coloring(Domain::Naturals);
        let xs = ints(&[2, 3, 5, 7, 11]);
        match ramsey_degree_extract(&c, &xs, 3, 4, u64::MAX).unwrap() {
            RamseyOutcome::Found { indices, .. } => assert_eq!(indices, vec![0, 1, 2, 3]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degree_one_is_pigeonhole() {
        let c = mod_coloring(2, Domain::Naturals);
        let xs = ints(&[1, 2, 4, 3, 6, 5]);
        match ramsey_degree_extract(&c, &xs, 1, 3, u64::MAX).unwrap() {
            RamseyOutcome::Found { indices, .. } => assert_eq!(indices, vec![0, 3, 5]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn matches_exhaustive_oracle() {
        let xs = ints(&(2..22).collect::<Vec<_>>());
        for seed in 0..20 {
            let c = seeded_random_coloring(Domain::Naturals, 2, seed);
            let oracle = combos(xs.len(), 3)
                .into_iter()
                .find(|s| verify_ramsey_degrees(&c, &xs, s, 2).is_ok());
            let got = match ramsey_degree_extract(&c, &xs, 2, 3, u64::MAX).unwrap() {
                RamseyOutcome::Found { indices, .. } => Some(indices),
                RamseyOutcome::Exhausted { .. } => None,
            };
            assert_eq!(got, oracle, "seed {seed}");
        }
    }

    #[test]
    fn exhausted_when_impossible() {
        let c = mod_coloring(2, Domain::Naturals);
        let xs = ints(&[1, 2, 3]);
        let out = ramsey_degree_extract(&c, &xs, 1, 3, u64::MAX).unwrap();
        assert!(matches!(out, RamseyOutcome::Exhausted { capped: false, .. }));
    }
}
