//! `{DX, DX + D²}` from a square-difference pair of the coloring
//! `g(C) = f(dx + C d²)`, with `x = d = N!`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::prop31::StepCheck;
use super::{Step, Trace, TraceStatus};
use crate::arith::{factorial, Rational};
use crate::coloring::{compose_affine, Coloring, Domain};
use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DxBudget {
    /// `k` ranges over `1..=k_max`.
    pub k_max: u64,
}

impl Default for DxBudget {
    fn default() -> Self {
        DxBudget { k_max: 10_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DxWitness {
    pub d: Rational,
    pub x: Rational,
    pub k: u64,
    pub c: u64,
    pub trace: Trace,
}

fn step(index: usize, mov: &str, description: &str, outputs: &[(&str, String)], check: Option<StepCheck>) -> Step {
    Step {
        index,
        mov: mov.into(),
        description: description.into(),
        inputs: BTreeMap::new(),
        outputs: outputs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        check,
        verified: true,
    }
}

/// Search `k = 1, 2, ...` (outer) and `c = 1..=n` (inner) for
/// `g(k) = g(k + c²)`, then set `X = (x + k d)/c`, `D = c d`. Returns the
/// trace with status `Exhausted` when no pair exists within the budget.
pub fn dx_witness_constructive(
    f: &Coloring,
    n: u32,
    budget: &DxBudget,
) -> Result<Result<DxWitness, Trace>, Error> {
    if f.domain() != Domain::Naturals {
        return Err(Error::Rejected("the construction needs a coloring of the naturals".into()));
    }
    if n == 0 || n > 20 || budget.k_max == 0 {
        return Err(Error::Rejected("need 1 <= N <= 20 and a positive k bound".into()));
    }
    let nf = Rational::from(factorial(n));
    let (x, d) = (nf.clone(), nf);
    let g = compose_affine(f, &d, &x)?;
    let mut steps = vec![
        step(1, "x = d = N!", "both divisible by every c <= N", &[("N", n.to_string()), ("x", x.to_string()), ("d", d.to_string())], None),
        step(2, "g(C) = f(dx + C d^2)", "composed coloring of the naturals", &[], None),
    ];
    let mut found = None;
    'search: for k in 1..=budget.k_max {
        let gk = g.color_int(k as i64)?;
        for c in 1..=n as u64 {
            if g.color(&Rational::from(BigInt::from(k) + BigInt::from(c * c)))? == gk {
                found = Some((k, c));
                break 'search;
            }
        }
    }
    let params = serde_json::json!({ "N": n, "k_max": budget.k_max });
    let trace = |steps: Vec<Step>, status: TraceStatus, result: BTreeMap<String, String>| Trace {
        kind: "dx".into(),
        coloring: f.descriptor().clone(),
        params: params.clone(),
        steps,
        status,
        result,
    };
    let Some((k, c)) = found else {
        steps.push(step(3, "find k, c with g(k) = g(k + c^2)", "no pair in range", &[], None));
        let status = TraceStatus::Exhausted {
            step: 3,
            reason: format!("no k <= {} and c <= {n}", budget.k_max),
        };
        return Ok(Err(trace(steps, status, BTreeMap::new())));
    };
    steps.push(step(
        3,
        "find k, c with g(k) = g(k + c^2)",
        "square-difference pair of g",
        &[("k", k.to_string()), ("c", c.to_string())],
        None,
    ));
    let cq = Rational::from(c as i64);
    let big_x = (&x + &(&Rational::from(k as i64) * &d)).checked_div(&cq)?;
    let big_d = &cq * &d;
    if !big_x.is_integer() || !big_d.is_integer() {
        return Err(Error::Rejected(format!("X = {big_x} or D = {big_d} is not an integer")));
    }
    let check = StepCheck::DxPair {
        d: big_d.clone(),
        x: big_x.clone(),
    };
    let verified = check.replay(f).is_ok();
    let dx = &big_d * &big_x;
    let mut last = step(
        4,
        "X = x/c + k d/c, D = c d",
        "then DX = dx + k d^2 and DX + D^2 = dx + (k + c^2) d^2",
        &[("D", big_d.to_string()), ("X", big_x.to_string()), ("DX", dx.to_string()), ("DX+D^2", (&dx + &(&big_d * &big_d)).to_string())],
        Some(check),
    );
    last.verified = verified;
    steps.push(last);
    if !verified {
        let status = TraceStatus::CheckFailed {
            step: 4,
            reason: "DX and DX + D^2 differ in color".into(),
        };
        return Ok(Err(trace(steps, status, BTreeMap::new())));
    }
    let result = [("D", big_d.to_string()), ("X", big_x.to_string())].into_iter().map(|(a, b)| (a.to_string(), b)).collect();
    Ok(Ok(DxWitness {
        d: big_d,
        x: big_x,
        k,
        c,
        trace: trace(steps, TraceStatus::Complete, result),
    }))
}
