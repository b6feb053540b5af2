//! Bounded witness search for a pattern under a coloring.
//!
//! Assignments are visited in canonical order: lexicographic over the
//! per-variable candidate lists, variable 0 outermost. The first
//! monochromatic assignment in that order is the witness, and the parallel
//! search reconciles to exactly the serial answer.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::arith::{enumerate_rationals, Rational, RationalMode};
use crate::coloring::{ColorId, Coloring, Descriptor};
use crate::error::{Error, PatternError};
use crate::pattern::{catalog_pattern, Pattern};

/// Candidate values for each variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum VarDomain {
    /// Every variable ranges over `enumerate_rationals(size_bound, mode)`.
    Rationals { size_bound: u64, mode: RationalMode },
    /// Inclusive integer ranges, one per variable; a single range applies to
    /// all variables.
    Integers { ranges: Vec<(i64, i64)> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub domain: VarDomain,
    /// Assignments with any term value above this are skipped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_value: Option<Rational>,
    pub node_cap: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<u64>,
}

impl SearchBudget {
    pub fn rationals(size_bound: u64, mode: RationalMode, node_cap: u64) -> SearchBudget {
        SearchBudget {
            domain: VarDomain::Rationals { size_bound, mode },
            max_value: None,
            node_cap,
            wall_clock_ms: None,
        }
    }

    pub fn integers(ranges: Vec<(i64, i64)>, node_cap: u64) -> SearchBudget {
        SearchBudget {
            domain: VarDomain::Integers { ranges },
            max_value: None,
            node_cap,
            wall_clock_ms: None,
        }
    }

    pub fn with_max_value(mut self, v: impl Into<Rational>) -> SearchBudget {
        self.max_value = Some(v.into());
        self
    }

    pub fn validate(&self, arity: usize) -> Result<(), Error> {
        if self.node_cap == 0 {
            return Err(Error::Rejected("node cap must be positive".into()));
        }
        if self.wall_clock_ms == Some(0) {
            return Err(Error::Rejected("wall-clock cap must be positive".into()));
        }
        if let VarDomain::Integers { ranges } = &self.domain {
            if ranges.len() != 1 && ranges.len() != arity {
                return Err(Error::Rejected(format!(
                    "{} integer ranges for a pattern of arity {arity}",
                    ranges.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapHit {
    NodeCap,
    WallClock,
}

/// A verified monochromatic instance of a pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub pattern: String,
    /// Whether variables were required to be pairwise distinct.
    pub distinct: bool,
    pub coloring: Descriptor,
    pub assignment: Vec<Rational>,
    pub values: Vec<Rational>,
    pub color: ColorId,
    pub engine: String,
    pub budget: SearchBudget,
    /// Assignments examined up to and including the witness.
    pub nodes: u64,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exhaustion {
    pub pattern: String,
    pub distinct: bool,
    pub coloring: Descriptor,
    pub budget: SearchBudget,
    pub nodes: u64,
    /// Which cap stopped the search; `None` means the space was fully explored.
    pub cap: Option<CapHit>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum SearchOutcome {
    Found(Witness),
    Exhausted(Exhaustion),
}

impl SearchOutcome {
    pub fn witness(&self) -> Option<&Witness> {
        match self {
            SearchOutcome::Found(w) => Some(w),
            SearchOutcome::Exhausted(_) => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }
}

enum Candidates {
    List(Vec<Rational>),
    Range(i64, i64),
}

impl Candidates {
    fn len(&self) -> usize {
        match self {
            Candidates::List(v) => v.len(),
            Candidates::Range(lo, hi) if hi >= lo => (hi - lo) as usize + 1,
            Candidates::Range(..) => 0,
        }
    }

    fn get(&self, i: usize) -> Rational {
        match self {
            Candidates::List(v) => v[i].clone(),
            Candidates::Range(lo, _) => Rational::from(lo + i as i64),
        }
    }

    fn ascending_positive(&self) -> bool {
        matches!(self, Candidates::Range(lo, _) if *lo >= 1)
    }
}

enum Flow {
    Continue,
    Found(Vec<Rational>, Vec<Rational>, ColorId),
    Cap(CapHit),
}

struct Searcher<'a> {
    pattern: &'a Pattern,
    coloring: &'a Coloring,
    cands: Vec<Candidates>,
    max_value: Option<Rational>,
    // partial-assignment bound checks are valid only for monotone patterns
    // over ascending positive candidates
    prune: bool,
    cap: u64,
    deadline: Option<Instant>,
}

impl<'a> Searcher<'a> {
    fn new(pattern: &'a Pattern, coloring: &'a Coloring, budget: &SearchBudget) -> Result<Self, Error> {
        budget.validate(pattern.arity())?;
        let arity = pattern.arity();
        let cands: Vec<Candidates> = match &budget.domain {
            VarDomain::Rationals { size_bound, mode } => {
                let list: Vec<Rational> = enumerate_rationals(*size_bound, *mode).collect();
                (0..arity).map(|_| Candidates::List(list.clone())).collect()
            }
            VarDomain::Integers { ranges } => (0..arity)
                .map(|i| {
                    let (lo, hi) = if ranges.len() == 1 { ranges[0] } else { ranges[i] };
                    Candidates::Range(lo, hi)
                })
                .collect(),
        };
        let prune = budget.max_value.is_some()
            && pattern.is_monotone()
            && cands.iter().all(Candidates::ascending_positive);
        Ok(Searcher {
            pattern,
            coloring,
            cands,
            max_value: budget.max_value.clone(),
            prune,
            cap: budget.node_cap,
            deadline: budget
                .wall_clock_ms
                .map(|ms| Instant::now() + Duration::from_millis(ms)),
        })
    }

    fn within_bound(&self, values: &[Rational]) -> bool {
        match &self.max_value {
            Some(m) => values.iter().all(|v| v <= m),
            None => true,
        }
    }

    /// Values at the current prefix with the remaining variables at their
    /// smallest candidates.
    fn partial_ok(&self, prefix: &[Rational]) -> bool {
        let mut full = prefix.to_vec();
        for c in &self.cands[prefix.len()..] {
            full.push(c.get(0));
        }
        self.within_bound(&self.pattern.instantiate_unchecked(&full))
    }

    fn leaf(&self, assignment: &[Rational], nodes: &mut u64) -> Result<Flow, Error> {
        if !self.pattern.admits(assignment) {
            return Ok(Flow::Continue);
        }
        let values = self.pattern.instantiate_unchecked(assignment);
        if !self.within_bound(&values) {
            return Ok(Flow::Continue);
        }
        if *nodes >= self.cap {
            return Ok(Flow::Cap(CapHit::NodeCap));
        }
        *nodes += 1;
        if *nodes % 4096 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Ok(Flow::Cap(CapHit::WallClock));
                }
            }
        }
        let domain = self.coloring.domain();
        if !values.iter().all(|v| domain.contains(v)) {
            return Ok(Flow::Continue);
        }
        let mut first: Option<ColorId> = None;
        for v in &values {
            let c = self.coloring.color(v)?;
            match first {
                Some(f) if f != c => return Ok(Flow::Continue),
                _ => first = Some(c),
            }
        }
        Ok(Flow::Found(
            assignment.to_vec(),
            values,
            first.expect("patterns have at least one term"),
        ))
    }

    fn dfs(&self, prefix: &mut Vec<Rational>, nodes: &mut u64) -> Result<Flow, Error> {
        let level = prefix.len();
        if level == self.cands.len() {
            return self.leaf(prefix, nodes);
        }
        for i in 0..self.cands[level].len() {
            prefix.push(self.cands[level].get(i));
            if self.prune && !self.partial_ok(prefix) {
                prefix.pop();
                break;
            }
            let flow = self.dfs(prefix, nodes)?;
            prefix.pop();
            if !matches!(flow, Flow::Continue) {
                return Ok(flow);
            }
        }
        Ok(Flow::Continue)
    }

    /// Search one slab: variable 0 fixed to its `outer`-th candidate.
    /// Returns `None` when a monotone bound cuts the slab and every later one.
    fn slab(&self, outer: usize, nodes: &mut u64) -> Result<Option<Flow>, Error> {
        let mut prefix = vec![self.cands[0].get(outer)];
        if self.prune && !self.partial_ok(&prefix) {
            return Ok(None);
        }
        self.dfs(&mut prefix, nodes).map(Some)
    }
}

fn finish(
    pattern: &Pattern,
    coloring: &Coloring,
    budget: &SearchBudget,
    engine: &str,
    flow: Flow,
    nodes: u64,
) -> Result<SearchOutcome, Error> {
    let exhausted = |cap| {
        SearchOutcome::Exhausted(Exhaustion {
            pattern: pattern.name().to_string(),
            distinct: pattern.constraints().distinct,
            coloring: coloring.descriptor().clone(),
            budget: budget.clone(),
            nodes,
            cap,
        })
    };
    match flow {
        Flow::Continue => Ok(exhausted(None)),
        Flow::Cap(c) => Ok(exhausted(Some(c))),
        Flow::Found(assignment, values, color) => {
            let mut w = Witness {
                pattern: pattern.name().to_string(),
                distinct: pattern.constraints().distinct,
                coloring: coloring.descriptor().clone(),
                assignment,
                values,
                color,
                engine: engine.to_string(),
                budget: budget.clone(),
                nodes,
                verified: false,
            };
            verify_witness_with(&w, pattern, coloring)
                .map_err(|f| Error::Rejected(format!("witness failed re-verification: {f}")))?;
            w.verified = true;
            Ok(SearchOutcome::Found(w))
        }
    }
}

/// First monochromatic instance of `pattern` in canonical order within the
/// budget, verified before it is returned.
pub fn pattern_search(
    coloring: &Coloring,
    pattern: &Pattern,
    budget: &SearchBudget,
) -> Result<SearchOutcome, Error> {
    let s = Searcher::new(pattern, coloring, budget)?;
    let mut nodes = 0u64;
    let mut flow = Flow::Continue;
    for outer in 0..s.cands[0].len() {
        match s.slab(outer, &mut nodes)? {
            None => break,
            Some(Flow::Continue) => {}
            Some(f) => {
                flow = f;
                break;
            }
        }
    }
    finish(pattern, coloring, budget, "serial", flow, nodes)
}

/// Parallel search over slabs of variable 0; returns exactly what
/// [`pattern_search`] returns for the same inputs.
#[cfg(feature = "parallel")]
pub fn pattern_search_parallel(
    coloring: &Coloring,
    pattern: &Pattern,
    budget: &SearchBudget,
) -> Result<SearchOutcome, Error> {
    use rayon::prelude::*;

    const CHUNK: usize = 64;
    let s = Searcher::new(pattern, coloring, budget)?;
    let total = s.cands[0].len();
    let mut nodes = 0u64;
    let mut start = 0;
    while start < total {
        let end = (start + CHUNK).min(total);
        // each slab runs with the full cap; reconciliation below replays the
        // serial node accounting
        let results: Vec<Result<(Option<Flow>, u64), Error>> = (start..end)
            .into_par_iter()
            .map(|outer| {
                let mut n = 0u64;
                let flow = s.slab(outer, &mut n)?;
                Ok((flow, n))
            })
            .collect();
        for r in results {
            let (flow, n) = r?;
            match flow {
                None => return finish(pattern, coloring, budget, "parallel", Flow::Continue, nodes),
                Some(Flow::Continue) => {
                    if nodes + n > s.cap {
                        nodes = s.cap;
                        return finish(pattern, coloring, budget, "parallel", Flow::Cap(CapHit::NodeCap), nodes);
                    }
                    nodes += n;
                }
                Some(Flow::Found(a, v, c)) => {
                    if nodes + n > s.cap {
                        nodes = s.cap;
                        return finish(pattern, coloring, budget, "parallel", Flow::Cap(CapHit::NodeCap), nodes);
                    }
                    nodes += n;
                    return finish(pattern, coloring, budget, "parallel", Flow::Found(a, v, c), nodes);
                }
                Some(Flow::Cap(hit)) => {
                    // the slab alone exhausted the cap (or the clock)
                    let n = match hit {
                        CapHit::NodeCap => s.cap,
                        CapHit::WallClock => nodes + n,
                    };
                    return finish(pattern, coloring, budget, "parallel", Flow::Cap(hit), n);
                }
            }
        }
        start = end;
    }
    finish(pattern, coloring, budget, "parallel", Flow::Continue, nodes)
}

/// Why a witness failed re-verification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyFailure {
    pub term_index: Option<usize>,
    pub term: Option<String>,
    pub reason: String,
}

impl std::fmt::Display for VerifyFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (&self.term_index, &self.term) {
            (Some(i), Some(t)) => write!(f, "term {i} ({t}): {}", self.reason),
            _ => f.write_str(&self.reason),
        }
    }
}

fn fail(reason: impl Into<String>) -> VerifyFailure {
    VerifyFailure {
        term_index: None,
        term: None,
        reason: reason.into(),
    }
}

/// Rebuild the pattern and coloring from the witness and re-check every term.
pub fn verify_witness(w: &Witness) -> Result<(), VerifyFailure> {
    let pattern = catalog_pattern(&w.pattern)
        .map_err(|e: PatternError| fail(e.to_string()))?
        .with_distinct(w.distinct);
    let coloring = Coloring::from_descriptor(&w.coloring).map_err(|e| fail(e.to_string()))?;
    verify_witness_with(w, &pattern, &coloring)
}

fn verify_witness_with(w: &Witness, pattern: &Pattern, coloring: &Coloring) -> Result<(), VerifyFailure> {
    let values = pattern
        .instantiate(&w.assignment)
        .map_err(|e| fail(e.to_string()))?;
    if values.len() != w.values.len() {
        return Err(fail("recorded value count differs from the pattern"));
    }
    // interned product palettes have instance-local ids
    let exact_ids = coloring.palette_size() != u64::MAX;
    let mut first = None;
    for (i, (v, recorded)) in values.iter().zip(&w.values).enumerate() {
        let term_fail = |reason: String| VerifyFailure {
            term_index: Some(i),
            term: Some(pattern.describe_term(i)),
            reason,
        };
        if v != recorded {
            return Err(term_fail(format!("recorded value {recorded}, recomputed {v}")));
        }
        let c = coloring.color(v).map_err(|e| term_fail(e.to_string()))?;
        let expected = if exact_ids { w.color } else { *first.get_or_insert(c) };
        if c != expected {
            return Err(term_fail(format!(
                "value {v} has color {}, witness color is {}",
                coloring.color_name(c),
                coloring.color_name(expected)
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{constant_coloring, mod_coloring, padic_sec6_coloring, Domain};
    use crate::pattern::sum_product_pattern;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&n| n.into()).collect()
    }

    #[test]
    fn constant_coloring_first_assignment() {
        let c = constant_coloring(Domain::PositiveRationals);
        let p = sum_product_pattern(3);
        let out = pattern_search(&c, &p, &SearchBudget::rationals(2, RationalMode::PositiveOnly, 10)).unwrap();
        let w = out.witness().unwrap();
        assert_eq!(w.assignment, ints(&[1, 1, 1]));
        assert_eq!(w.nodes, 1);
        assert!(w.verified);
    }

    #[test]
    fn parity_schur() {
        let c = mod_coloring(2, Domain::Naturals);
        let p = catalog_pattern("schur").unwrap();
        let out = pattern_search(&c, &p, &SearchBudget::integers(vec![(1, 10)], 1000)).unwrap();
        // (1,1): 1,1,2 differ in parity; (1,2): 1,2,3 no; ... (2,2): 2,2,4 yes
        assert_eq!(out.witness().unwrap().assignment, ints(&[2, 2]));
        let strict = p.with_distinct(true);
        let out = pattern_search(&c, &strict, &SearchBudget::integers(vec![(1, 10)], 1000)).unwrap();
        assert_eq!(out.witness().unwrap().assignment, ints(&[2, 4]));
    }

    #[test]
    fn padic_three_multiples_small_exhausts() {
        let c = padic_sec6_coloring();
        let p = catalog_pattern("three-multiples").unwrap();
        let budget = SearchBudget::integers(vec![(1, 10_000), (1, 30)], u64::MAX).with_max_value(10_000);
        match pattern_search(&c, &p, &budget).unwrap() {
            SearchOutcome::Exhausted(e) => {
                assert_eq!(e.cap, None);
                // oracle: count (b, c) with (b+2)c <= 10^4 directly
                let mut expect = 0u64;
                for b in 1..=10_000i64 {
                    for cc in 1..=30i64 {
                        if (b + 2) * cc <= 10_000 {
                            expect += 1;
                        }
                    }
                }
                assert_eq!(e.nodes, expect);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn node_cap_reports_exhaustion() {
        let c = padic_sec6_coloring();
        let p = catalog_pattern("three-multiples").unwrap();
        let budget = SearchBudget::integers(vec![(1, 100)], 17);
        match pattern_search(&c, &p, &budget).unwrap() {
            SearchOutcome::Exhausted(e) => {
                assert_eq!(e.cap, Some(CapHit::NodeCap));
                assert_eq!(e.nodes, 17);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_budget_rejected() {
        let c = constant_coloring(Domain::Naturals);
        let p = catalog_pattern("schur").unwrap();
        assert!(pattern_search(&c, &p, &SearchBudget::integers(vec![(1, 3); 3], 10)).is_err());
        assert!(pattern_search(&c, &p, &SearchBudget::integers(vec![(1, 3)], 0)).is_err());
    }

    #[test]
    fn tampered_witness_names_term() {
        let c = mod_coloring(2, Domain::Naturals);
        let p = catalog_pattern("schur").unwrap();
        let out = pattern_search(&c, &p, &SearchBudget::integers(vec![(1, 10)], 1000)).unwrap();
        let mut w = out.witness().unwrap().clone();
        assert!(verify_witness(&w).is_ok());
        w.assignment[1] = 3.into();
        let err = verify_witness(&w).unwrap_err();
        assert_eq!(err.term_index, Some(1));
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_matches_serial() {
        let p = catalog_pattern("moreira").unwrap();
        for seed in 0..8 {
            let c = crate::coloring::seeded_random_coloring(Domain::Naturals, 3, seed);
            for cap in [5, 40, 100_000] {
                let b = SearchBudget::integers(vec![(1, 300)], cap).with_max_value(300);
                let mut serial = pattern_search(&c, &p, &b).unwrap();
                let mut par = pattern_search_parallel(&c, &p, &b).unwrap();
                if let (SearchOutcome::Found(a), SearchOutcome::Found(b)) = (&mut serial, &mut par) {
                    a.engine.clear();
                    b.engine.clear();
                }
                assert_eq!(serial, par, "seed {seed} cap {cap}");
            }
        }
    }
}
