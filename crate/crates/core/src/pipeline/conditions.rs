//! Checkers for the color-invariance conditions: every good linear form
//! `P` of bounded size must give `P(x0; args)` the color of `P(x0)`.

use serde::{Deserialize, Serialize};

use crate::arith::{enumerate_good_polys, enumerate_rationals, CoeffMode, GoodPolynomial, Rational};
use crate::coloring::{ColorId, Coloring, Descriptor, Domain};
use crate::error::{ColoringError, Error};

/// Coefficient convention matching a coloring's domain: nonnegative forms
/// on the positive rationals, all forms elsewhere.
pub fn coeff_mode_for(domain: Domain) -> CoeffMode {
    match domain {
        Domain::PositiveRationals => CoeffMode::Positive,
        _ => CoeffMode::Full,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionFailure {
    /// Which family failed, e.g. `"2"` or `"i=3 T'={1}"`.
    pub condition: String,
    pub poly: GoodPolynomial,
    pub x0: Rational,
    pub args: Vec<Rational>,
    pub value: Rational,
    pub value_color: ColorId,
    pub reference: Rational,
    pub reference_color: ColorId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum CheckOutcome {
    /// `skipped_zero` counts forms that vanish where the coloring excludes 0.
    Pass { checked: u64, skipped_zero: u64 },
    Fail(Box<ConditionFailure>),
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CheckOutcome::Pass { .. })
    }
}

/// One `(x0, args)` family to check against all forms of the arity.
#[derive(Clone, Debug)]
pub(crate) struct Family {
    pub label: String,
    pub x0: Rational,
    pub args: Vec<Rational>,
}

fn color_or_skip(c: &Coloring, v: &Rational) -> Result<Option<ColorId>, Error> {
    match c.color(v) {
        Ok(col) => Ok(Some(col)),
        Err(ColoringError::OutOfDomain { .. }) if v.is_zero() => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub(crate) fn check_families(
    c: &Coloring,
    families: &[Family],
    m: u64,
    mode: CoeffMode,
) -> Result<CheckOutcome, Error> {
    let leading: Vec<Rational> = enumerate_rationals(m, mode.leading_mode()).collect();
    let others = enumerate_rationals(m, mode.other_mode()).count();
    let mut checked = 0;
    let mut skipped_zero = 0;
    for fam in families {
        if fam.x0.is_zero() {
            return Err(Error::Rejected(format!("{}: leading argument is zero", fam.label)));
        }
        let refs: Vec<(Rational, ColorId)> = leading
            .iter()
            .map(|c0| {
                let r = c0 * &fam.x0;
                c.color(&r).map(|col| (r, col))
            })
            .collect::<Result<_, _>>()?;
        // the leading coefficient is the slowest-moving slot
        let per_leading = others.pow(fam.args.len() as u32);
        for (p, poly) in enumerate_good_polys(m, fam.args.len(), mode).enumerate() {
            let value = poly.eval(&fam.x0, &fam.args)?;
            let (reference, reference_color) = &refs[p / per_leading];
            let Some(value_color) = color_or_skip(c, &value)? else {
                skipped_zero += 1;
                continue;
            };
            checked += 1;
            if value_color != *reference_color {
                return Ok(CheckOutcome::Fail(Box::new(ConditionFailure {
                    condition: fam.label.clone(),
                    poly,
                    x0: fam.x0.clone(),
                    args: fam.args.clone(),
                    value,
                    value_color,
                    reference: reference.clone(),
                    reference_color: *reference_color,
                })));
            }
        }
    }
    Ok(CheckOutcome::Pass {
        checked,
        skipped_zero,
    })
}

/// The three conditions on `(a, b, c)`; `strengthened` uses the wider
/// argument lists `(b/c, b, c, bc)` and `(b, bc, c², bc²)` for the first two.
pub fn prop31_conditions_check(
    coloring: &Coloring,
    a: &Rational,
    b: &Rational,
    c: &Rational,
    m: u64,
    mode: CoeffMode,
    strengthened: bool,
) -> Result<CheckOutcome, Error> {
    if a.is_zero() || b.is_zero() || c.is_zero() {
        return Err(Error::Rejected("a, b, c must be nonzero".into()));
    }
    check_families(coloring, &prop31_families(a, b, c, strengthened)?, m, mode)
}

pub(crate) fn prop31_families(
    a: &Rational,
    b: &Rational,
    c: &Rational,
    strengthened: bool,
) -> Result<Vec<Family>, Error> {
    let bc = b * c;
    let ac = a * c;
    let fam = |label: &str, x0: &Rational, args: Vec<Rational>| Family {
        label: label.to_string(),
        x0: x0.clone(),
        args,
    };
    Ok(if strengthened {
        let b_over_c = b.checked_div(c)?;
        vec![
            fam("1", a, vec![b_over_c, b.clone(), c.clone(), bc.clone()]),
            fam("2", &ac, vec![b.clone(), bc.clone(), c * c, &bc * c]),
            fam("3", b, vec![c.clone()]),
        ]
    } else {
        vec![
            fam("1", a, vec![b.clone(), c.clone(), bc]),
            fam("2", &ac, vec![b.clone()]),
            fam("3", b, vec![c.clone()]),
        ]
    })
}

fn mask_elems(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |j| mask >> j & 1 == 1).map(|j| j + 1)
}

fn fmt_set(mask: u32) -> String {
    let v: Vec<String> = mask_elems(mask).map(|j| j.to_string()).collect();
    format!("{{{}}}", v.join(","))
}

/// Exponent-vector description of the families for general `n`, indices
/// `1..=n`. Each entry: label, exponents of `x0`, exponents of each arg.
pub(crate) fn prop_main_shapes(n: usize, strengthened: bool) -> Vec<(String, Vec<i32>, Vec<Vec<i32>>)> {
    let mut out = Vec::new();
    for i in 1..=n {
        let below = (1u32 << (i - 1)) - 1;
        // nonempty S ⊆ [i-1] lying above every element of T
        let admissible = |t: u32| {
            (1..=below)
                .filter(move |&s| t == 0 || s.trailing_zeros() >= 32 - t.leading_zeros())
        };
        for t_prime in 0..=below {
            if admissible(t_prime).next().is_none() {
                continue;
            }
            let mut x0 = vec![0i32; n + 1];
            x0[i] = 1;
            for j in mask_elems(t_prime) {
                x0[j] += 1;
            }
            let mut args = Vec::new();
            if strengthened {
                for s in 1..=below {
                    for t in 0..=below {
                        if t != 0 && s.trailing_zeros() < 32 - t.leading_zeros() {
                            continue;
                        }
                        let mut e = vec![0i32; n + 1];
                        for j in mask_elems(s) {
                            e[j] += 1;
                        }
                        for j in mask_elems(t) {
                            e[j] -= 1;
                        }
                        for j in mask_elems(t_prime) {
                            e[j] += 1;
                        }
                        args.push(e);
                    }
                }
            } else {
                for s in admissible(t_prime) {
                    let mut e = vec![0i32; n + 1];
                    for j in mask_elems(s) {
                        e[j] += 1;
                    }
                    args.push(e);
                }
            }
            let label = if strengthened {
                format!("i={i} T'={}", fmt_set(t_prime))
            } else {
                format!("i={i} T={}", fmt_set(t_prime))
            };
            out.push((label, x0, args));
        }
    }
    out
}

fn monomial(xs: &[Rational], e: &[i32]) -> Result<Rational, Error> {
    let mut acc = Rational::one();
    for (j, &k) in e.iter().enumerate().skip(1) {
        if k != 0 {
            acc = acc * xs[j - 1].pow(k)?;
        }
    }
    Ok(acc)
}

/// General-`n` condition check on `x_1, ..., x_n` (given in that order).
/// Plain mode checks, for each `i`, each `T ⊆ [i-1]`,
/// arguments `∏_{j∈S} x_j` over nonempty `S ⊆ [i-1]` above `T`. The
/// strengthened mode checks, for each `i` and each such `T'`, the leading
/// argument `x_i ∏_{T'} x_j` against `∏_S x_j ∏_{T'} x_j / ∏_T x_j` over
/// nonempty `S` and any `T` below `S`.
pub fn prop_main_conditions_check(
    coloring: &Coloring,
    xs: &[Rational],
    m: u64,
    mode: CoeffMode,
    strengthened: bool,
) -> Result<CheckOutcome, Error> {
    if xs.iter().any(Rational::is_zero) {
        return Err(Error::Rejected("all x_j must be nonzero".into()));
    }
    if xs.len() > 12 {
        return Err(Error::Rejected("at most 12 variables".into()));
    }
    let families = prop_main_shapes(xs.len(), strengthened)
        .into_iter()
        .map(|(label, x0, args)| {
            Ok(Family {
                label,
                x0: monomial(xs, &x0)?,
                args: args.iter().map(|e| monomial(xs, e)).collect::<Result<_, Error>>()?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    check_families(coloring, &families, m, mode)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop31Witness {
    pub coloring: Descriptor,
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub m: u64,
    pub mode: CoeffMode,
    pub strengthened: bool,
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Prop31SearchOutcome {
    Found(Prop31Witness),
    Exhausted { nodes: u64, capped: bool },
}

/// First triple `(a, b, c)` in lexicographic order over
/// `enumerate_rationals(size_bound)` (`a` outermost) passing the check.
pub fn prop31_search(
    coloring: &Coloring,
    m: u64,
    strengthened: bool,
    size_bound: u64,
    node_cap: u64,
) -> Result<Prop31SearchOutcome, Error> {
    let mode = coeff_mode_for(coloring.domain());
    let cands: Vec<Rational> = enumerate_rationals(size_bound, mode.leading_mode()).collect();
    // condition 3 involves only (b, c)
    let mut pairs = Vec::new();
    for b in &cands {
        for c in &cands {
            let fam = [Family {
                label: "3".into(),
                x0: b.clone(),
                args: vec![c.clone()],
            }];
            if check_families(coloring, &fam, m, mode)?.passed() {
                pairs.push((b, c));
            }
        }
    }
    let mut nodes = 0u64;
    for a in &cands {
        for &(b, c) in &pairs {
            nodes += 1;
            if nodes > node_cap {
                return Ok(Prop31SearchOutcome::Exhausted {
                    nodes: nodes - 1,
                    capped: true,
                });
            }
            if prop31_conditions_check(coloring, a, b, c, m, mode, strengthened)?.passed() {
                return Ok(Prop31SearchOutcome::Found(Prop31Witness {
                    coloring: coloring.descriptor().clone(),
                    a: a.clone(),
                    b: b.clone(),
                    c: c.clone(),
                    m,
                    mode,
                    strengthened,
                    nodes,
                }));
            }
        }
    }
    Ok(Prop31SearchOutcome::Exhausted {
        nodes,
        capped: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{constant_coloring, mod_coloring, seeded_random_coloring};

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn constant_coloring_always_passes() {
        let c = constant_coloring(Domain::NonzeroRationals);
        for strengthened in [false, true] {
            let out = prop31_conditions_check(&c, &q("3"), &q("-2/5"), &q("7"), 2, CoeffMode::Full, strengthened).unwrap();
            assert!(out.passed());
        }
        let xs = [q("2"), q("-1/3"), q("7/2")];
        assert!(prop_main_conditions_check(&c, &xs, 1, CoeffMode::Full, true).unwrap().passed());
    }

    #[test]
    fn parity_triple_matches_hand_enumeration() {
        // numerator parity on the positive rationals, a = b = c = 2, M = 1:
        // every form is c0*a + e·(args) with c0 = 1 and e ∈ {0,1}, so all
        // values are even integers, same color as 2.
        let c = mod_coloring(2, Domain::PositiveRationals);
        let two = q("2");
        let out = prop31_conditions_check(&c, &two, &two, &two, 1, CoeffMode::Positive, false).unwrap();
        assert_eq!(out, CheckOutcome::Pass { checked: 8 + 2 + 2, skipped_zero: 0 });
        // strengthened adds b/c = 1: a + b/c = 3 is odd
        let out = prop31_conditions_check(&c, &two, &two, &two, 1, CoeffMode::Positive, true).unwrap();
        match out {
            CheckOutcome::Fail(f) => {
                assert_eq!(f.condition, "1");
                assert_eq!(f.value, q("3"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shapes_at_three_match_the_triple_conditions() {
        let plain = prop_main_shapes(3, false);
        let labels: Vec<&str> = plain.iter().map(|s| s.0.as_str()).collect();
        assert_eq!(labels, vec!["i=2 T={}", "i=3 T={}", "i=3 T={1}"]);
        let strong = prop_main_shapes(3, true);
        assert_eq!(strong.len(), 3);
        assert_eq!(strong[1].2.len(), 4);
        assert_eq!(strong[2].1, vec![0, 1, 0, 1]);
        // two variables: only T = ∅, S = {1}
        assert_eq!(prop_main_shapes(2, false).len(), 1);
        assert_eq!(prop_main_shapes(2, true), prop_main_shapes(2, false).into_iter().map(|(l, x, a)| (l.replace("T=", "T'="), x, a)).collect::<Vec<_>>());
    }

    #[test]
    fn main_check_agrees_with_triple_check() {
        let (a, b, cv) = (q("4"), q("2/3"), q("6"));
        for seed in 0..20 {
            let col = seeded_random_coloring(Domain::PositiveRationals, 2, seed);
            for strengthened in [false, true] {
                let t = prop31_conditions_check(&col, &a, &b, &cv, 1, CoeffMode::Positive, strengthened).unwrap();
                let m = prop_main_conditions_check(&col, &[cv.clone(), b.clone(), a.clone()], 1, CoeffMode::Positive, strengthened).unwrap();
                assert_eq!(t.passed(), m.passed());
            }
        }
    }

    #[test]
    fn zero_values_are_skipped_on_nonzero_domain() {
        let c = constant_coloring(Domain::NonzeroRationals);
        let out = prop31_conditions_check(&c, &q("1"), &q("1"), &q("1"), 1, CoeffMode::Full, false).unwrap();
        match out {
            CheckOutcome::Pass { skipped_zero, .. } => assert!(skipped_zero > 0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn search_finds_constant_triple_first() {
        let c = constant_coloring(Domain::PositiveRationals);
        match prop31_search(&c, 1, true, 3, 1000).unwrap() {
            Prop31SearchOutcome::Found(w) => {
                assert_eq!((w.a, w.b, w.c), (q("1"), q("1"), q("1")));
                assert_eq!(w.nodes, 1);
            }
            other => panic!("{other:?}"),
        }
    }
}
