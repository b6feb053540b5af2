//! Bounded search for configurations `u + Σ c_i p_i(n) v_i` that are
//! monochromatic for every coefficient tuple with `size(c_i) ≤ M`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::arith::{enumerate_rationals, Rational, RationalMode};
use crate::coloring::ColorId;
use crate::error::{ColoringError, Error};
use crate::search::CapHit;

/// Color of a point of `ℚ^ℓ`.
pub type GridColoring<'a> = dyn Fn(&[Rational]) -> Result<ColorId, ColoringError> + 'a;

/// `u = center + step·z` for integer `z` with `|z|_∞ ≤ radius`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UGrid {
    pub center: Vec<Rational>,
    pub step: Rational,
    pub radius: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MpvdwInstance {
    /// Coefficients of each `p_i` on `n, n², ...` (so `p_i(0) = 0`).
    pub polys: Vec<Vec<i64>>,
    pub vectors: Vec<Vec<Rational>>,
    pub coeff_bound: u64,
    /// Coefficients range over nonnegative rationals instead of all of them.
    pub nonnegative_coeffs: bool,
    /// `n` ranges over `1, -1, 2, -2, ...` up to this magnitude.
    pub n_bound: i64,
    pub positive_n_only: bool,
    pub u_grid: UGrid,
    pub node_cap: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<u64>,
}

impl MpvdwInstance {
    /// Instance with the default bounds `|n| ≤ 50` and `u` in a box of
    /// radius 3 around `center`.
    pub fn new(
        polys: Vec<Vec<i64>>,
        vectors: Vec<Vec<Rational>>,
        coeff_bound: u64,
        center: Vec<Rational>,
    ) -> Result<MpvdwInstance, Error> {
        let inst = MpvdwInstance {
            polys,
            vectors,
            coeff_bound,
            nonnegative_coeffs: false,
            n_bound: 50,
            positive_n_only: false,
            u_grid: UGrid {
                center,
                step: Rational::one(),
                radius: 3,
            },
            node_cap: 10_000_000,
            wall_clock_ms: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn dim(&self) -> usize {
        self.u_grid.center.len()
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: String| Err(Error::Rejected(m));
        if self.dim() == 0 {
            return bad("dimension must be positive".into());
        }
        if self.polys.is_empty() || self.polys.len() != self.vectors.len() {
            return bad("need one vector per polynomial".into());
        }
        if self.polys.iter().any(|p| p.iter().all(|&c| c == 0)) {
            return bad("polynomials must be nonzero with zero constant term".into());
        }
        if self.vectors.iter().any(|v| v.len() != self.dim()) {
            return bad("vector dimension mismatch".into());
        }
        if self.coeff_bound == 0 || self.n_bound <= 0 || self.node_cap == 0 {
            return bad("bounds must be positive".into());
        }
        if self.u_grid.step.is_zero() {
            return bad("grid step must be nonzero".into());
        }
        Ok(())
    }

    /// All coefficient tuples, the zero tuple first.
    pub fn coeff_tuples(&self) -> Vec<Vec<Rational>> {
        let mode = if self.nonnegative_coeffs {
            RationalMode::NonNegative
        } else {
            RationalMode::WithZero
        };
        let values: Vec<Rational> = enumerate_rationals(self.coeff_bound, mode).collect();
        let k = self.polys.len();
        let mut out = vec![Vec::new()];
        for _ in 0..k {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |v| {
                        let mut t = prefix.clone();
                        t.push(v.clone());
                        t
                    })
                })
                .collect();
        }
        // zero sorts first in with-zero enumeration, so the zero tuple leads
        debug_assert!(out[0].iter().all(Rational::is_zero));
        out
    }

    fn n_order(&self) -> Vec<i64> {
        let mut ns = Vec::new();
        for m in 1..=self.n_bound {
            ns.push(m);
            if !self.positive_n_only {
                ns.push(-m);
            }
        }
        ns
    }

    /// Integer offsets in the `u` box by sup-norm, then lexicographically.
    fn offsets(&self) -> Vec<Vec<i64>> {
        let r = self.u_grid.radius as i64;
        let dim = self.dim();
        let mut all: Vec<Vec<i64>> = vec![Vec::new()];
        for _ in 0..dim {
            all = all
                .into_iter()
                .flat_map(|p| {
                    (-r..=r).map(move |z| {
                        let mut q = p.clone();
                        q.push(z);
                        q
                    })
                })
                .collect();
        }
        all.sort_by_key(|z| (z.iter().map(|x| x.abs()).max().unwrap_or(0), z.clone()));
        all
    }
}

fn eval_poly(coeffs: &[i64], n: i64) -> Rational {
    let n = Rational::from(n);
    let mut acc = Rational::zero();
    let mut power = n.clone();
    for &c in coeffs {
        acc = acc + Rational::from(c) * &power;
        power = power * &n;
    }
    acc
}

/// Offsets `Σ c_i p_i(n) v_i` for every coefficient tuple.
fn shifts(inst: &MpvdwInstance, tuples: &[Vec<Rational>], n: i64) -> Vec<Vec<Rational>> {
    let scaled: Vec<Vec<Rational>> = inst
        .polys
        .iter()
        .zip(&inst.vectors)
        .map(|(p, v)| {
            let pn = eval_poly(p, n);
            v.iter().map(|x| x * &pn).collect()
        })
        .collect();
    tuples
        .iter()
        .map(|t| {
            let mut s = vec![Rational::zero(); inst.dim()];
            for (c, w) in t.iter().zip(&scaled) {
                if c.is_zero() {
                    continue;
                }
                for (si, wi) in s.iter_mut().zip(w) {
                    *si = &*si + &(c * wi);
                }
            }
            s
        })
        .collect()
}

fn add(u: &[Rational], s: &[Rational]) -> Vec<Rational> {
    u.iter().zip(s).map(|(a, b)| a + b).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MpvdwWitness {
    pub u: Vec<Rational>,
    pub n: i64,
    pub color: ColorId,
    /// Every configuration point, in coefficient-tuple order.
    pub points: Vec<Vec<Rational>>,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum MpvdwOutcome {
    Found(MpvdwWitness),
    Exhausted { nodes: u64, cap: Option<CapHit> },
}

impl MpvdwOutcome {
    pub fn witness(&self) -> Option<&MpvdwWitness> {
        match self {
            MpvdwOutcome::Found(w) => Some(w),
            MpvdwOutcome::Exhausted { .. } => None,
        }
    }
}

/// First `(n, u)` in search order (`n` outer) whose whole configuration is
/// monochromatic. Candidates touching a point outside the coloring's domain
/// are skipped.
pub fn mpvdw_search(coloring: &GridColoring, inst: &MpvdwInstance) -> Result<MpvdwOutcome, Error> {
    inst.validate()?;
    let tuples = inst.coeff_tuples();
    let offsets = inst.offsets();
    let start = Instant::now();
    let mut nodes = 0u64;
    for n in inst.n_order() {
        let shift = shifts(inst, &tuples, n);
        'u: for z in &offsets {
            nodes += 1;
            if nodes > inst.node_cap {
                return Ok(MpvdwOutcome::Exhausted {
                    nodes: nodes - 1,
                    cap: Some(CapHit::NodeCap),
                });
            }
            if let Some(ms) = inst.wall_clock_ms {
                if nodes.is_multiple_of(1024) && start.elapsed().as_millis() as u64 >= ms {
                    return Ok(MpvdwOutcome::Exhausted {
                        nodes,
                        cap: Some(CapHit::WallClock),
                    });
                }
            }
            let u: Vec<Rational> = inst
                .u_grid
                .center
                .iter()
                .zip(z)
                .map(|(c, &zi)| c + &(&inst.u_grid.step * &Rational::from(zi)))
                .collect();
            let mut color = None;
            for s in &shift {
                let point = add(&u, s);
                let c = match coloring(&point) {
                    Ok(c) => c,
                    Err(ColoringError::OutOfDomain { .. }) => continue 'u,
                    Err(e) => return Err(e.into()),
                };
                match color {
                    None => color = Some(c),
                    Some(f) if f != c => continue 'u,
                    _ => {}
                }
            }
            let w = MpvdwWitness {
                points: shift.iter().map(|s| add(&u, s)).collect(),
                u,
                n,
                color: color.expect("at least the zero tuple"),
                nodes,
            };
            verify_mpvdw(coloring, inst, &w)?;
            return Ok(MpvdwOutcome::Found(w));
        }
    }
    Ok(MpvdwOutcome::Exhausted { nodes, cap: None })
}

/// Recompute every configuration point from `(u, n)` and check its color.
pub fn verify_mpvdw(coloring: &GridColoring, inst: &MpvdwInstance, w: &MpvdwWitness) -> Result<(), Error> {
    let tuples = inst.coeff_tuples();
    let shift = shifts(inst, &tuples, w.n);
    if w.points.len() != shift.len() {
        return Err(Error::Rejected("witness has the wrong number of points".into()));
    }
    for (t, (s, p)) in tuples.iter().zip(shift.iter().zip(&w.points)) {
        let expect = add(&w.u, s);
        if &expect != p {
            return Err(Error::Rejected(format!("point for coefficients {t:?} is wrong")));
        }
        if coloring(p)? != w.color {
            return Err(Error::Rejected(format!(
                "point for coefficients {t:?} has a different color"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{constant_coloring, seeded_random_coloring, Coloring, Domain};
    use crate::pattern::catalog_pattern;
    use crate::search::{pattern_search, SearchBudget};

    fn on_first(c: &Coloring) -> impl Fn(&[Rational]) -> Result<ColorId, ColoringError> + '_ {
        move |p: &[Rational]| c.color(&p[0])
    }

    #[test]
    fn constant_coloring_takes_first_point() {
        let c = constant_coloring(Domain::NonzeroRationals);
        let grid = |_: &[Rational]| -> Result<ColorId, ColoringError> {
            c.color(&Rational::one())
        };
        let inst = MpvdwInstance::new(
            vec![vec![1], vec![0, 1]],
            vec![
                vec![Rational::one(), Rational::zero()],
                vec![Rational::zero(), Rational::one()],
            ],
            1,
            vec![Rational::from(5), Rational::from(5)],
        )
        .unwrap();
        let w = mpvdw_search(&grid, &inst).unwrap().witness().cloned().unwrap();
        assert_eq!(w.n, 1);
        assert_eq!(w.u, vec![Rational::from(5), Rational::from(5)]);
        assert_eq!(w.points.len(), 9);
    }

    #[test]
    fn one_dimensional_case_is_a_three_term_progression() {
        let vdw3 = catalog_pattern("vdw3").unwrap();
        for seed in 0..10 {
            let c = seeded_random_coloring(Domain::Naturals, 2, seed);
            let mut inst = MpvdwInstance::new(
                vec![vec![1]],
                vec![vec![Rational::one()]],
                1,
                vec![Rational::from(20)],
            )
            .unwrap();
            inst.u_grid.radius = 19;
            inst.positive_n_only = true;
            inst.n_bound = 19;
            let grid = on_first(&c);
            let w = mpvdw_search(&grid, &inst).unwrap().witness().cloned().unwrap();
            // {u-n, u, u+n} is a progression with difference n
            let x = &w.u[0] - &Rational::from(w.n);
            let assignment = [x, Rational::from(w.n)];
            assert!(crate::pattern::is_monochromatic(&c, &vdw3, &assignment).unwrap().is_some());
            // a progression inside [1..39] exists too, by the pattern engine
            let b = SearchBudget::integers(vec![(1, 39)], u64::MAX).with_max_value(39);
            assert!(pattern_search(&c, &vdw3, &b).unwrap().is_found());
        }
    }

    #[test]
    fn out_of_domain_candidates_are_skipped() {
        let c = constant_coloring(Domain::PositiveRationals);
        let mut inst = MpvdwInstance::new(
            vec![vec![1]],
            vec![vec![Rational::one()]],
            1,
            vec![Rational::from(1)],
        )
        .unwrap();
        inst.u_grid.radius = 2;
        let grid = on_first(&c);
        let w = mpvdw_search(&grid, &inst).unwrap().witness().cloned().unwrap();
        assert!(w.points.iter().all(|p| p[0].is_positive()));
        assert_eq!((w.n, w.u[0].to_i64()), (1, Some(2)));
    }

    #[test]
    fn tampered_witness_fails() {
        let c = seeded_random_coloring(Domain::Naturals, 2, 3);
        let mut inst = MpvdwInstance::new(vec![vec![1]], vec![vec![Rational::one()]], 1, vec![Rational::from(30)]).unwrap();
        inst.u_grid.radius = 25;
        let grid = on_first(&c);
        let mut w = mpvdw_search(&grid, &inst).unwrap().witness().cloned().unwrap();
        verify_mpvdw(&grid, &inst, &w).unwrap();
        w.n += 1;
        assert!(verify_mpvdw(&grid, &inst, &w).is_err());
    }

    #[test]
    fn invalid_instances_rejected() {
        assert!(MpvdwInstance::new(vec![vec![0]], vec![vec![Rational::one()]], 1, vec![Rational::one()]).is_err());
        assert!(MpvdwInstance::new(vec![vec![1]], vec![vec![Rational::one(); 2]], 1, vec![Rational::one()]).is_err());
    }
}
