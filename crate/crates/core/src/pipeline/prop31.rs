//! The three-variable construction: a van der Waerden pair `(b, c)` under
//! an auxiliary product coloring, two bounded multidimensional polynomial
//! van der Waerden searches in `ℚ⁴` along `w = (b/c, b, c, bc)`, and the
//! rescalings and shift between them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::conditions::{check_families, coeff_mode_for, prop31_families, CheckOutcome};
use super::{Step, Trace, TraceStatus};
use crate::arith::{enumerate_rationals, CoeffMode, Rational, RationalMode};
use crate::coloring::{product_coloring, ColorId, Coloring, Domain};
use crate::error::Error;
use crate::searchers::{mpvdw_search, MpvdwInstance, MpvdwOutcome, UGrid};

/// Size parameters, largest first: `M₀ ≥ M₁ ≥ M′ ≥ M₂ ≥ M₃`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MChain {
    pub m0: u64,
    pub m_prime: u64,
    pub m1: u64,
    pub m2: u64,
    pub m3: u64,
}

impl Default for MChain {
    fn default() -> Self {
        MChain {
            m0: 1,
            m_prime: 1,
            m1: 1,
            m2: 1,
            m3: 1,
        }
    }
}

impl MChain {
    pub fn validate(&self) -> Result<(), Error> {
        let MChain { m0, m_prime, m1, m2, m3 } = *self;
        if m3 == 0 || !(m0 >= m1 && m1 >= m_prime && m_prime >= m2 && m2 >= m3) {
            return Err(Error::Rejected(format!(
                "size chain must satisfy M0 >= M1 >= M' >= M2 >= M3 >= 1, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop31Params {
    pub chain: MChain,
    /// Size bound for the `(b, c)` candidates.
    pub bc_size_bound: u64,
    /// `n` ranges over `1..=n_bound` in both grid searches.
    pub n_bound: i64,
    /// `u` ranges over the integer box of this radius around 0.
    pub u_radius: u32,
    pub node_cap: u64,
}

impl Default for Prop31Params {
    fn default() -> Self {
        Prop31Params {
            chain: MChain::default(),
            bc_size_bound: 6,
            n_bound: 6,
            u_radius: 2,
            node_cap: 1_000_000,
        }
    }
}

/// A re-runnable claim recorded by a step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "claim", rename_all = "kebab-case")]
pub enum StepCheck {
    /// The product coloring with this multiplier bound has this many
    /// multipliers.
    ProductColoring { bound: u64, multipliers: usize },
    /// `scale·(base + Σ ℓ_i vecs_i)` share one color under the product
    /// coloring with multiplier bound `product_bound`, for every `ℓ` with
    /// `size(ℓ_i) ≤ coeff_bound` (nonnegative when `nonneg`).
    AffineMono {
        base: Rational,
        scale: Rational,
        vecs: Vec<Rational>,
        coeff_bound: u64,
        nonneg: bool,
        product_bound: u64,
    },
    /// The triple conditions at bound `m`; only the third when `a` is absent.
    Conditions {
        a: Option<Rational>,
        b: Rational,
        c: Rational,
        m: u64,
        mode: CoeffMode,
        strengthened: bool,
    },
    /// `f(D·X) = f(D·X + D²)` for the two-term pattern.
    DxPair { d: Rational, x: Rational },
    /// The sum-product pattern is monochromatic on these values.
    SumProduct { xs: Vec<Rational> },
}

impl StepCheck {
    pub fn replay(&self, coloring: &Coloring) -> Result<(), Error> {
        match self {
            StepCheck::ProductColoring { bound, multipliers } => {
                let p = product_coloring(coloring, *bound)?;
                let got = p.multipliers().map_or(0, <[Rational]>::len);
                if got != *multipliers {
                    return Err(Error::Rejected(format!("{got} multipliers, recorded {multipliers}")));
                }
                Ok(())
            }
            StepCheck::AffineMono {
                base,
                scale,
                vecs,
                coeff_bound,
                nonneg,
                product_bound,
            } => {
                let p = product_coloring(coloring, *product_bound)?;
                affine_mono(&p, base, scale, vecs, *coeff_bound, *nonneg)?
                    .map(|_| ())
                    .ok_or_else(|| Error::Rejected("values take two colors".into()))
            }
            StepCheck::Conditions {
                a,
                b,
                c,
                m,
                mode,
                strengthened,
            } => {
                let out = conditions(coloring, a.as_ref(), b, c, *m, *mode, *strengthened)?;
                match out {
                    CheckOutcome::Pass { .. } => Ok(()),
                    CheckOutcome::Fail(f) => Err(Error::Rejected(format!(
                        "condition {} fails for P = {}",
                        f.condition, f.poly
                    ))),
                }
            }
            StepCheck::DxPair { d, x } => {
                let p = crate::pattern::catalog_pattern("dx-d2")?;
                crate::pattern::is_monochromatic(coloring, &p, &[d.clone(), x.clone()])?
                    .map(|_| ())
                    .ok_or_else(|| Error::Rejected("DX and DX+D^2 differ in color".into()))
            }
            StepCheck::SumProduct { xs } => {
                let p = crate::pattern::sum_product_pattern(xs.len());
                crate::pattern::is_monochromatic(coloring, &p, xs)?
                    .map(|_| ())
                    .ok_or_else(|| Error::Rejected("sum-product values differ in color".into()))
            }
        }
    }
}

fn conditions(
    coloring: &Coloring,
    a: Option<&Rational>,
    b: &Rational,
    c: &Rational,
    m: u64,
    mode: CoeffMode,
    strengthened: bool,
) -> Result<CheckOutcome, Error> {
    let a_or_one = a.cloned().unwrap_or_else(Rational::one);
    let mut fams = prop31_families(&a_or_one, b, c, strengthened)?;
    if a.is_none() {
        fams.retain(|f| f.label == "3");
    }
    check_families(coloring, &fams, m, mode)
}

fn coeff_values(bound: u64, nonneg: bool) -> Vec<Rational> {
    let mode = if nonneg {
        RationalMode::NonNegative
    } else {
        RationalMode::WithZero
    };
    enumerate_rationals(bound, mode).collect()
}

/// Common color of all `scale·(base + ℓ·vecs)`, or `None` if two differ.
fn affine_mono(
    coloring: &Coloring,
    base: &Rational,
    scale: &Rational,
    vecs: &[Rational],
    coeff_bound: u64,
    nonneg: bool,
) -> Result<Option<ColorId>, Error> {
    let values = coeff_values(coeff_bound, nonneg);
    let mut idx = vec![0usize; vecs.len()];
    let mut first = None;
    loop {
        let mut v = base.clone();
        for (i, &j) in idx.iter().enumerate() {
            if !values[j].is_zero() {
                v = v + &values[j] * &vecs[i];
            }
        }
        let col = coloring.color(&(scale * &v))?;
        match first {
            None => first = Some(col),
            Some(f) if f != col => return Ok(None),
            _ => {}
        }
        let mut pos = vecs.len();
        loop {
            if pos == 0 {
                return Ok(first);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < values.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

fn eval_mono(coeffs: &[i64], k: i64) -> Rational {
    let mut acc = Rational::zero();
    let mut pw = Rational::from(k);
    for &c in coeffs {
        acc = acc + Rational::from(c) * &pw;
        pw = pw * &Rational::from(k);
    }
    acc
}

fn dot(u: &[Rational], w: &[Rational]) -> Rational {
    u.iter().zip(w).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

fn fmt_vec(v: &[Rational]) -> String {
    let s: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", s.join(", "))
}

struct Recorder {
    steps: Vec<Step>,
}

impl Recorder {
    fn push(
        &mut self,
        mov: &str,
        description: String,
        inputs: &[(&str, String)],
        outputs: &[(&str, String)],
        check: Option<StepCheck>,
    ) -> usize {
        let index = self.steps.len() + 1;
        let map = |kv: &[(&str, String)]| -> BTreeMap<String, String> {
            kv.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
        };
        self.steps.push(Step {
            index,
            mov: mov.to_string(),
            description,
            inputs: map(inputs),
            outputs: map(outputs),
            check,
            verified: false,
        });
        index
    }

    /// Run the latest step's check; `Err` carries the failure reason.
    fn verify(&mut self, coloring: &Coloring) -> Result<(), String> {
        let step = self.steps.last_mut().expect("a step");
        if let Some(check) = &step.check {
            check.replay(coloring).map_err(|e| e.to_string())?;
        }
        step.verified = true;
        Ok(())
    }
}

fn w_of(b: &Rational, c: &Rational) -> Result<Vec<Rational>, Error> {
    Ok(vec![b.checked_div(c)?, b.clone(), c.clone(), b * c])
}

fn unit_vectors(dim: usize) -> Vec<Vec<Rational>> {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

/// Execute the construction on a coloring of `ℚ⁺` or `ℚ∖{0}` with at most
/// two colors. Internal searches that run out of budget, and claims that
/// fail at the given sizes, end the trace at the step concerned.
pub fn prop31_trace(coloring: &Coloring, params: &Prop31Params) -> Result<Trace, Error> {
    params.chain.validate()?;
    if coloring.palette_size() > 2 {
        return Err(Error::Rejected("the construction expects at most two colors".into()));
    }
    if coloring.domain() == Domain::Naturals {
        return Err(Error::Rejected("the construction needs a coloring of the rationals".into()));
    }
    if params.bc_size_bound == 0 || params.n_bound <= 0 || params.node_cap == 0 {
        return Err(Error::Rejected("search bounds must be positive".into()));
    }
    let MChain { m0, m_prime, m1, m2, m3 } = params.chain;
    let mode = coeff_mode_for(coloring.domain());
    let nonneg = mode == CoeffMode::Positive;
    let mut rec = Recorder { steps: Vec::new() };
    let finish = |rec: Recorder, status: TraceStatus, result: BTreeMap<String, String>| Trace {
        kind: "prop31".into(),
        coloring: coloring.descriptor().clone(),
        params: serde_json::to_value(params).expect("serializable"),
        steps: rec.steps,
        status,
        result,
    };
    macro_rules! verify_or_stop {
        ($rec:expr) => {
            if let Err(reason) = $rec.verify(coloring) {
                let step = $rec.steps.len();
                return Ok(finish($rec, TraceStatus::CheckFailed { step, reason }, BTreeMap::new()));
            }
        };
    }

    // product coloring over multipliers of size at most M0
    let chi2 = product_coloring(coloring, m0)?;
    let multipliers = chi2.multipliers().map_or(0, <[Rational]>::len);
    rec.push(
        "chi2(x) = (chi1(Kx)) over s(K) <= M0",
        format!("auxiliary product coloring with {multipliers} multipliers"),
        &[("M0", m0.to_string())],
        &[("multipliers", multipliers.to_string())],
        Some(StepCheck::ProductColoring { bound: m0, multipliers }),
    );
    verify_or_stop!(rec);

    // (b, c) with chi2(b + q c) = chi2(b) for all s(q) <= M0
    let cands: Vec<Rational> = enumerate_rationals(params.bc_size_bound, mode.leading_mode()).collect();
    let mut nodes = 0u64;
    let mut pair = None;
    'search: for b in &cands {
        for c in &cands {
            nodes += 1;
            if nodes > params.node_cap {
                break 'search;
            }
            match affine_mono(&chi2, b, &Rational::one(), std::slice::from_ref(c), m0, nonneg) {
                Ok(Some(_)) => {
                    pair = Some((b.clone(), c.clone()));
                    break 'search;
                }
                Ok(None) | Err(Error::Coloring(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    let inputs = [("M0", m0.to_string()), ("size bound", params.bc_size_bound.to_string())];
    let Some((mut b, mut c)) = pair else {
        let step = rec.push(
            "find b, c with chi2(b + q c) = chi2(b), s(q) <= M0",
            format!("no pair among {} candidates", cands.len()),
            &inputs,
            &[("nodes", nodes.to_string())],
            None,
        );
        let reason = format!("no (b, c) of size <= {} after {nodes} nodes", params.bc_size_bound);
        return Ok(finish(rec, TraceStatus::Exhausted { step, reason }, BTreeMap::new()));
    };
    rec.push(
        "find b, c with chi2(b + q c) = chi2(b), s(q) <= M0",
        "van der Waerden pair under the product coloring".into(),
        &inputs,
        &[("b", b.to_string()), ("c", c.to_string()), ("nodes", nodes.to_string())],
        Some(StepCheck::AffineMono {
            base: b.clone(),
            scale: Rational::one(),
            vecs: vec![c.clone()],
            coeff_bound: m0,
            nonneg,
            product_bound: m0,
        }),
    );
    verify_or_stop!(rec);

    rec.push(
        "color(P(b; c)) = color(P(b)) for s(P) <= M1",
        "third condition follows from the pair".into(),
        &[("M1", m1.to_string())],
        &[],
        Some(StepCheck::Conditions {
            a: None,
            b: b.clone(),
            c: c.clone(),
            m: m1,
            mode,
            strengthened: false,
        }),
    );
    verify_or_stop!(rec);

    // first grid search: (p1..p4) = (n, n^2, n, n^3) under X2(q . w)
    let polys1: Vec<Vec<i64>> = vec![vec![1], vec![0, 1], vec![1], vec![0, 0, 1]];
    let x2 = product_coloring(coloring, m_prime)?;
    let w = w_of(&b, &c)?;
    let inst = grid_instance(&polys1, m2, nonneg, params);
    let grid = |q: &[Rational]| x2.color(&dot(q, &w));
    let out = mpvdw_search(&grid, &inst)?;
    let mv1 = "mpvdw in Z^4, (p1,p2,p3,p4) = (n, n^2, n, n^3), v_i = e_i";
    let MpvdwOutcome::Found(hit) = out else {
        let step = rec.push(mv1, "no monochromatic configuration in the grid".into(), &[("M2", m2.to_string())], &[], None);
        let reason = format!("{out:?}");
        return Ok(finish(rec, TraceStatus::Exhausted { step, reason }, BTreeMap::new()));
    };
    let k = hit.n;
    let mut a = dot(&hit.u, &w);
    let shifted: Vec<Rational> = polys1
        .iter()
        .zip(&w)
        .map(|(p, wi)| eval_mono(p, k) * wi)
        .collect();
    rec.push(
        mv1,
        "a = u . w; a + sum l_i p_i(k) w_i share one X2 color".into(),
        &[("M'", m_prime.to_string()), ("M2", m2.to_string()), ("w", fmt_vec(&w))],
        &[("u", fmt_vec(&hit.u)), ("k", k.to_string()), ("a", a.to_string())],
        Some(StepCheck::AffineMono {
            base: a.clone(),
            scale: Rational::one(),
            vecs: shifted,
            coeff_bound: m2,
            nonneg,
            product_bound: m_prime,
        }),
    );
    verify_or_stop!(rec);

    let kq = Rational::from(k);
    b = &kq * &(&kq * &b);
    c = &kq * &c;
    let w = w_of(&b, &c)?;
    rec.push(
        "(b, c) -> (k^2 b, k c)",
        "color of K(a + l . w) equals color of K a for s(K), s(l_i) <= M2".into(),
        &[("k", k.to_string())],
        &[("b", b.to_string()), ("c", c.to_string())],
        Some(StepCheck::AffineMono {
            base: a.clone(),
            scale: Rational::one(),
            vecs: w.clone(),
            coeff_bound: m2,
            nonneg,
            product_bound: m2,
        }),
    );
    verify_or_stop!(rec);

    rec.push(
        "color(P(b; c)) = color(P(b)) for s(P) <= M2",
        "third condition after rescaling".into(),
        &[("M2", m2.to_string())],
        &[],
        Some(StepCheck::Conditions {
            a: None,
            b: b.clone(),
            c: c.clone(),
            m: m2,
            mode,
            strengthened: false,
        }),
    );
    verify_or_stop!(rec);

    // second grid search: (p1..p4) = (n^2, n^3, n^2, n^4) under X2(c (a + q . w))
    let polys2: Vec<Vec<i64>> = vec![vec![0, 1], vec![0, 0, 1], vec![0, 1], vec![0, 0, 0, 1]];
    let inst = grid_instance(&polys2, m3, nonneg, params);
    let grid = |q: &[Rational]| x2.color(&(&c * &(&a + &dot(q, &w))));
    let out = mpvdw_search(&grid, &inst)?;
    let mv2 = "mpvdw in Z^4, (p1,p2,p3,p4) = (n^2, n^3, n^2, n^4); a -> a + u . w";
    let MpvdwOutcome::Found(hit) = out else {
        let step = rec.push(mv2, "no monochromatic configuration in the grid".into(), &[("M3", m3.to_string())], &[], None);
        let reason = format!("{out:?}");
        return Ok(finish(rec, TraceStatus::Exhausted { step, reason }, BTreeMap::new()));
    };
    let k = hit.n;
    a = &a + &dot(&hit.u, &w);
    let shifted: Vec<Rational> = polys2
        .iter()
        .zip(&w)
        .map(|(p, wi)| eval_mono(p, k) * wi)
        .collect();
    rec.push(
        mv2,
        "c(a + sum l_i p_i(k) w_i) share one X2 color".into(),
        &[("M'", m_prime.to_string()), ("M3", m3.to_string()), ("w", fmt_vec(&w))],
        &[("u", fmt_vec(&hit.u)), ("k", k.to_string()), ("a", a.to_string())],
        Some(StepCheck::AffineMono {
            base: a.clone(),
            scale: c.clone(),
            vecs: shifted,
            coeff_bound: m3,
            nonneg,
            product_bound: m_prime,
        }),
    );
    verify_or_stop!(rec);

    let kq = Rational::from(k);
    a = a.checked_div(&kq)?;
    b = &kq * &(&kq * &b);
    c = &kq * &c;
    let w = w_of(&b, &c)?;
    rec.push(
        "(a, b, c) -> (a/k, k^2 b, k c)",
        "c(a + l . w) share one X2 color for s(l_i) <= M3".into(),
        &[("k", k.to_string())],
        &[("a", a.to_string()), ("b", b.to_string()), ("c", c.to_string())],
        Some(StepCheck::AffineMono {
            base: a.clone(),
            scale: c.clone(),
            vecs: w,
            coeff_bound: m3,
            nonneg,
            product_bound: m_prime,
        }),
    );
    verify_or_stop!(rec);

    rec.push(
        "check all three strengthened conditions at M3",
        "final check on (a, b, c)".into(),
        &[("M3", m3.to_string())],
        &[],
        Some(StepCheck::Conditions {
            a: Some(a.clone()),
            b: b.clone(),
            c: c.clone(),
            m: m3,
            mode,
            strengthened: true,
        }),
    );
    verify_or_stop!(rec);

    let result = [("a", a), ("b", b), ("c", c)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    Ok(finish(rec, TraceStatus::Complete, result))
}

fn grid_instance(polys: &[Vec<i64>], coeff_bound: u64, nonneg: bool, params: &Prop31Params) -> MpvdwInstance {
    MpvdwInstance {
        polys: polys.to_vec(),
        vectors: unit_vectors(4),
        coeff_bound,
        nonnegative_coeffs: nonneg,
        n_bound: params.n_bound,
        positive_n_only: true,
        u_grid: UGrid {
            center: vec![Rational::zero(); 4],
            step: Rational::one(),
            radius: params.u_radius,
        },
        node_cap: params.node_cap,
        wall_clock_ms: None,
    }
}
