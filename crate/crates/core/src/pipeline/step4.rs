//! Assemble `X_i = x_{n-i} ∏_{j∈S_i} x_j` and check the sum-product
//! pattern on them.

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::coloring::{ColorId, Coloring};
use crate::error::Error;
use crate::pattern::sum_product_pattern;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Step4Outcome {
    Verified {
        xs: Vec<Rational>,
        color: ColorId,
    },
    /// Term `term_index` of the sum-product pattern differs in color from
    /// the first term.
    Failed {
        xs: Vec<Rational>,
        term_index: usize,
        term: String,
        value: Rational,
    },
}

/// `xs` holds `x_1, ..., x_n`; `sets[i-1]` is `S_i` with 1-based indices.
pub fn assemble_step4(
    c: &Coloring,
    xs: &[Rational],
    degrees: &[u32],
    sets: &[Vec<usize>],
) -> Result<Step4Outcome, Error> {
    let n = xs.len();
    let r = degrees.len();
    let reject = |m: String| Err(Error::Rejected(m));
    if r == 0 || sets.len() != r {
        return reject(format!("{r} degrees but {} sets", sets.len()));
    }
    if r >= n {
        return reject(format!("need r < n, got r = {r}, n = {n}"));
    }
    for (i, (s, &a)) in sets.iter().zip(degrees).enumerate() {
        if a == 0 || s.len() != a as usize - 1 {
            return reject(format!("|S_{}| = {} but a_{} = {a}", i + 1, s.len(), i + 1));
        }
        if s.windows(2).any(|w| w[0] >= w[1]) || s.contains(&0) {
            return reject(format!("S_{} must be increasing 1-based indices", i + 1));
        }
        if s.iter().any(|&j| 2 * j >= n) {
            return reject(format!("S_{} has an index not below n/2", i + 1));
        }
    }
    for i in 1..r {
        if let (Some(hi), Some(lo)) = (sets[i - 1].last(), sets[i].first()) {
            if lo <= hi {
                return reject(format!("S_{} is not entirely above S_{i}", i + 1));
            }
        }
    }
    let big: Vec<Rational> = (1..=r)
        .map(|i| {
            sets[i - 1]
                .iter()
                .fold(xs[n - i - 1].clone(), |acc, &j| acc * &xs[j - 1])
        })
        .collect();
    let p = sum_product_pattern(r);
    let values = p.instantiate(&big)?;
    let first = c.color(&values[0])?;
    for (t, v) in values.iter().enumerate() {
        if c.color(v)? != first {
            return Ok(Step4Outcome::Failed {
                xs: big,
                term_index: t,
                term: p.describe_term(t),
                value: v.clone(),
            });
        }
    }
    Ok(Step4Outcome::Verified { xs: big, color: first })
}
