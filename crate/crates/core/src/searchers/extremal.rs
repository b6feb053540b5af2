//! Largest `N` such that some `k`-coloring of `[1..N]` avoids a pattern,
//! by backtracking or by SAT, with certificates for both directions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::instantiations_with_reach;
use crate::error::Error;
use crate::pattern::{catalog_pattern, pvdw_pattern, Pattern};
use crate::sat::{
    coloring_from_assignment, decode_assignment, encode_avoidance, monochromatic_in_range,
    solve_external, SatResult, SolverConfig,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Brute,
    Sat,
    Both,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::Brute => "brute",
            Engine::Sat => "sat",
            Engine::Both => "both",
        }
    }

    pub fn parse(s: &str) -> Option<Engine> {
        match s {
            "brute" => Some(Engine::Brute),
            "sat" => Some(Engine::Sat),
            "both" => Some(Engine::Both),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalOptions {
    /// Give up (with a partial bound) past this `N`.
    pub max_n: u32,
    /// Backtracking nodes allowed per value of `N`.
    pub node_cap: u64,
    pub solver: Option<SolverConfig>,
    pub symmetry_breaking: bool,
}

impl Default for ExtremalOptions {
    fn default() -> Self {
        ExtremalOptions {
            max_n: 64,
            node_cap: 50_000_000,
            solver: None,
            symmetry_breaking: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum RefutationMethod {
    /// Backtracking over all colorings (up to color permutation).
    Exhaustive { nodes: u64 },
    Unsat { vars: u32, clauses: usize, solver: String },
}

/// Evidence that no `k`-coloring of `[1..n]` avoids the pattern.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refutation {
    pub n: u32,
    #[serde(flatten)]
    pub method: RefutationMethod,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalCertificate {
    pub pattern: String,
    pub distinct: bool,
    pub colors: u32,
    pub engine: Engine,
    pub largest_avoiding: u32,
    /// Colors of `1..=largest_avoiding`.
    pub avoiding_coloring: Vec<u32>,
    pub refutations: Vec<Refutation>,
}

impl ExtremalCertificate {
    /// Least `N` at which every coloring contains the pattern.
    pub fn forcing_n(&self) -> u32 {
        self.largest_avoiding + 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ExtremalOutcome {
    Exact(ExtremalCertificate),
    /// Avoiding colorings exist up to `lower`; nothing is known beyond.
    Partial {
        pattern: String,
        colors: u32,
        engine: Engine,
        lower: u32,
        avoiding_coloring: Vec<u32>,
        reason: String,
    },
}

impl ExtremalOutcome {
    pub fn certificate(&self) -> Option<&ExtremalCertificate> {
        match self {
            ExtremalOutcome::Exact(c) => Some(c),
            ExtremalOutcome::Partial { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteResult {
    Avoiding(Vec<u32>),
    NoneExists { nodes: u64 },
    CapHit { nodes: u64 },
}

/// Instantiation sets for growing `N`, recomputed at doubling caps.
struct SetCache<'a> {
    pattern: &'a Pattern,
    cap: u32,
    sets: BTreeMap<Vec<u32>, u32>,
}

impl<'a> SetCache<'a> {
    fn new(pattern: &'a Pattern) -> Self {
        SetCache {
            pattern,
            cap: 0,
            sets: BTreeMap::new(),
        }
    }

    /// Sets in range at `n`, grouped by largest element.
    fn by_max(&mut self, n: u32) -> Result<Vec<Vec<Vec<u32>>>, Error> {
        if n > self.cap {
            self.cap = n.max(self.cap * 2).max(8);
            self.sets = instantiations_with_reach(self.pattern, self.cap)?;
        }
        let mut by_max = vec![Vec::new(); n as usize + 1];
        for (set, &reach) in &self.sets {
            if reach <= n {
                by_max[*set.last().expect("nonempty") as usize].push(set.clone());
            }
        }
        Ok(by_max)
    }
}

/// Backtracking search for an avoiding `k`-coloring of `[1..n]`. New colors
/// are introduced in order, so colorings are explored up to permutation.
pub fn brute_avoiding(
    pattern: &Pattern,
    k: u32,
    n: u32,
    node_cap: u64,
) -> Result<BruteResult, Error> {
    let by_max = SetCache::new(pattern).by_max(n)?;
    Ok(brute_with_sets(&by_max, k, n, node_cap))
}

fn brute_with_sets(by_max: &[Vec<Vec<u32>>], k: u32, n: u32, node_cap: u64) -> BruteResult {
    struct Dfs<'a> {
        by_max: &'a [Vec<Vec<u32>>],
        k: u32,
        n: u32,
        colors: Vec<u32>,
        nodes: u64,
        cap: u64,
        capped: bool,
    }
    impl Dfs<'_> {
        fn go(&mut self, pos: u32, used: u32) -> bool {
            if pos > self.n {
                return true;
            }
            for c in 0..self.k.min(used + 1) {
                self.nodes += 1;
                if self.nodes > self.cap {
                    self.capped = true;
                    return false;
                }
                self.colors[pos as usize] = c;
                let blocked = self.by_max[pos as usize]
                    .iter()
                    .any(|set| set.iter().all(|&m| self.colors[m as usize] == c));
                if !blocked && self.go(pos + 1, used.max(c + 1)) {
                    return true;
                }
                if self.capped {
                    return false;
                }
            }
            false
        }
    }
    let mut dfs = Dfs {
        by_max,
        k,
        n,
        colors: vec![0; n as usize + 1],
        nodes: 0,
        cap: node_cap,
        capped: false,
    };
    if dfs.go(1, 0) {
        BruteResult::Avoiding(dfs.colors[1..].to_vec())
    } else if dfs.capped {
        BruteResult::CapHit { nodes: dfs.nodes }
    } else {
        BruteResult::NoneExists { nodes: dfs.nodes }
    }
}

enum Verdict {
    Avoiding(Vec<u32>),
    Refuted(Refutation),
    Unknown(String),
}

fn sat_verdict(
    pattern: &Pattern,
    k: u32,
    n: u32,
    opts: &ExtremalOptions,
) -> Result<Verdict, Error> {
    let solver = opts
        .solver
        .as_ref()
        .ok_or_else(|| Error::Rejected("the sat engine needs a configured solver".into()))?;
    let inst = encode_avoidance(n, k, pattern, opts.symmetry_breaking)?;
    Ok(match solve_external(&inst, solver)? {
        SatResult::Sat(model) => Verdict::Avoiding(decode_assignment(&inst, &model)?),
        SatResult::Unsat => Verdict::Refuted(Refutation {
            n,
            method: RefutationMethod::Unsat {
                vars: inst.num_vars,
                clauses: inst.clauses.len(),
                solver: solver.command.clone(),
            },
        }),
        SatResult::Unknown(why) => Verdict::Unknown(format!("solver at N={n}: {why}")),
    })
}

fn brute_verdict(cache: &mut SetCache, k: u32, n: u32, cap: u64) -> Result<Verdict, Error> {
    let by_max = cache.by_max(n)?;
    Ok(match brute_with_sets(&by_max, k, n, cap) {
        BruteResult::Avoiding(c) => Verdict::Avoiding(c),
        BruteResult::NoneExists { nodes } => Verdict::Refuted(Refutation {
            n,
            method: RefutationMethod::Exhaustive { nodes },
        }),
        BruteResult::CapHit { nodes } => {
            Verdict::Unknown(format!("backtracking node cap hit at N={n} after {nodes} nodes"))
        }
    })
}

/// Largest `N` admitting a `k`-coloring of `[1..N]` with no monochromatic
/// in-range instance of `pattern`. With [`Engine::Both`] the two engines
/// must agree at every `N`, and the certificate carries both refutations.
pub fn largest_avoiding(
    pattern: &Pattern,
    k: u32,
    engine: Engine,
    opts: &ExtremalOptions,
) -> Result<ExtremalOutcome, Error> {
    if k == 0 {
        return Err(Error::Rejected("at least one color required".into()));
    }
    if !pattern.is_integer_valued() {
        return Err(Error::Rejected(format!(
            "pattern {} is not integer-valued",
            pattern.name()
        )));
    }
    let mut cache = SetCache::new(pattern);
    let mut best: Vec<u32> = Vec::new();
    let partial = |best: &Vec<u32>, reason: String| ExtremalOutcome::Partial {
        pattern: pattern.name().to_string(),
        colors: k,
        engine,
        lower: best.len() as u32,
        avoiding_coloring: best.clone(),
        reason,
    };
    for n in 1..=opts.max_n {
        let verdicts = match engine {
            Engine::Brute => vec![brute_verdict(&mut cache, k, n, opts.node_cap)?],
            Engine::Sat => vec![sat_verdict(pattern, k, n, opts)?],
            Engine::Both => vec![
                brute_verdict(&mut cache, k, n, opts.node_cap)?,
                sat_verdict(pattern, k, n, opts)?,
            ],
        };
        let mut refutations = Vec::new();
        let mut avoiding = None;
        for v in verdicts {
            match v {
                Verdict::Unknown(why) => return Ok(partial(&best, why)),
                Verdict::Avoiding(c) => {
                    if avoiding.is_none() {
                        avoiding = Some(c);
                    }
                }
                Verdict::Refuted(r) => refutations.push(r),
            }
        }
        match (avoiding, refutations.is_empty()) {
            (Some(c), true) => best = c,
            (None, false) => {
                return Ok(ExtremalOutcome::Exact(ExtremalCertificate {
                    pattern: pattern.name().to_string(),
                    distinct: pattern.constraints().distinct,
                    colors: k,
                    engine,
                    largest_avoiding: best.len() as u32,
                    avoiding_coloring: best,
                    refutations,
                }))
            }
            _ => {
                return Err(Error::Rejected(format!(
                    "engines disagree on {} with {k} colors at N={n}",
                    pattern.name()
                )))
            }
        }
    }
    Ok(partial(&best, format!("no refutation up to N={}", opts.max_n)))
}

/// Re-check a certificate: the avoiding coloring through the generic
/// pattern search, and the refutation by backtracking (within `node_cap`).
pub fn verify_certificate(cert: &ExtremalCertificate, node_cap: u64) -> Result<(), Error> {
    let pattern = catalog_pattern(&cert.pattern)?.with_distinct(cert.distinct);
    if cert.avoiding_coloring.len() != cert.largest_avoiding as usize {
        return Err(Error::Rejected("avoiding coloring has the wrong length".into()));
    }
    if cert.avoiding_coloring.iter().any(|&c| c >= cert.colors) {
        return Err(Error::Rejected("avoiding coloring uses too many colors".into()));
    }
    let coloring = coloring_from_assignment(&cert.avoiding_coloring, cert.colors)?;
    if let Some(a) = monochromatic_in_range(&coloring, &pattern, cert.largest_avoiding)? {
        return Err(Error::Rejected(format!(
            "avoiding coloring has a monochromatic instance at {a:?}"
        )));
    }
    if cert.refutations.is_empty() {
        return Err(Error::Rejected("certificate has no refutation".into()));
    }
    for r in &cert.refutations {
        if r.n != cert.forcing_n() {
            return Err(Error::Rejected(format!("refutation at N={} instead of {}", r.n, cert.forcing_n())));
        }
    }
    match brute_avoiding(&pattern, cert.colors, cert.forcing_n(), node_cap)? {
        BruteResult::NoneExists { .. } => Ok(()),
        BruteResult::Avoiding(c) => Err(Error::Rejected(format!(
            "refutation is wrong: {c:?} avoids the pattern"
        ))),
        BruteResult::CapHit { nodes } => Err(Error::Rejected(format!(
            "refutation not re-checked within {nodes} nodes"
        ))),
    }
}

/// Largest `N` with a `k`-coloring of `[1..N]` free of monochromatic
/// `{x, y, x+y}` (`x = y` allowed unless `distinct`).
pub fn schur_number(
    k: u32,
    distinct: bool,
    engine: Engine,
    opts: &ExtremalOptions,
) -> Result<ExtremalOutcome, Error> {
    let p = catalog_pattern("schur")?.with_distinct(distinct);
    largest_avoiding(&p, k, engine, opts)
}

/// The van der Waerden number is the certificate's `forcing_n()`.
pub fn vdw_number(
    k: u32,
    len: u32,
    engine: Engine,
    opts: &ExtremalOptions,
) -> Result<ExtremalOutcome, Error> {
    let p = catalog_pattern(&format!("vdw{len}"))?;
    largest_avoiding(&p, k, engine, opts)
}

/// For `{x, x + p(d)}`; the least forcing `N` is the certificate's
/// `forcing_n()`.
pub fn pvdw_min_n(
    k: u32,
    coeffs: &[i64],
    engine: Engine,
    opts: &ExtremalOptions,
) -> Result<ExtremalOutcome, Error> {
    let p = pvdw_pattern(coeffs)?;
    largest_avoiding(&p, k, engine, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(p: &Pattern, k: u32) -> ExtremalCertificate {
        largest_avoiding(p, k, Engine::Brute, &ExtremalOptions::default())
            .unwrap()
            .certificate()
            .cloned()
            .unwrap()
    }

    /// Avoiding-coloring existence by trying all k^n colorings.
    fn naive_exists(p: &Pattern, k: u32, n: u32) -> bool {
        let sets = super::super::instantiations(p, n).unwrap();
        let total = (k as u64).pow(n);
        (0..total).any(|mut code| {
            let mut col = vec![0; n as usize + 1];
            for m in 1..=n as usize {
                col[m] = code % k as u64;
                code /= k as u64;
            }
            sets.iter().all(|s| s.iter().any(|&m| col[m as usize] != col[s[0] as usize]))
        })
    }

    #[test]
    fn schur_small() {
        let opts = ExtremalOptions::default();
        for (k, want) in [(1, 1), (2, 4)] {
            let c = schur_number(k, false, Engine::Brute, &opts).unwrap();
            let cert = c.certificate().unwrap();
            assert_eq!(cert.largest_avoiding, want);
            verify_certificate(cert, 1 << 30).unwrap();
        }
    }

    #[test]
    fn vdw_and_pvdw_small() {
        let opts = ExtremalOptions::default();
        let v = vdw_number(2, 2, Engine::Brute, &opts).unwrap();
        assert_eq!(v.certificate().unwrap().forcing_n(), 3);
        let v = vdw_number(2, 3, Engine::Brute, &opts).unwrap();
        assert_eq!(v.certificate().unwrap().forcing_n(), 9);
        for coeffs in [vec![1], vec![0, 1], vec![2, 1], vec![-1, 1]] {
            let p1: i64 = coeffs.iter().sum();
            let c = pvdw_min_n(1, &coeffs, Engine::Brute, &opts).unwrap();
            assert_eq!(c.certificate().unwrap().forcing_n() as i64, 1 + p1, "{coeffs:?}");
        }
        let c = pvdw_min_n(2, &[1], Engine::Brute, &opts).unwrap();
        assert_eq!(c.certificate().unwrap().forcing_n(), 3);
    }

    #[test]
    fn backtracking_matches_naive_enumeration() {
        for p in crate::pattern::integer_catalog() {
            for n in 1..=9 {
                let got = matches!(
                    brute_avoiding(&p, 2, n, u64::MAX).unwrap(),
                    BruteResult::Avoiding(_)
                );
                assert_eq!(got, naive_exists(&p, 2, n), "{} n={n}", p.name());
            }
        }
    }

    #[test]
    fn tampered_certificate_is_rejected() {
        let mut cert = brute(&catalog_pattern("schur").unwrap(), 2);
        cert.avoiding_coloring[0] ^= 1;
        assert!(verify_certificate(&cert, 1 << 30).is_err());
        let mut cert = brute(&catalog_pattern("schur").unwrap(), 2);
        cert.largest_avoiding -= 1;
        cert.avoiding_coloring.pop();
        assert!(verify_certificate(&cert, 1 << 30).is_err());
    }

    #[test]
    fn node_cap_gives_partial() {
        let opts = ExtremalOptions {
            node_cap: 10,
            ..Default::default()
        };
        let out = schur_number(3, false, Engine::Brute, &opts).unwrap();
        assert!(matches!(out, ExtremalOutcome::Partial { .. }));
    }

    #[test]
    fn sat_engine_needs_solver() {
        let out = schur_number(2, false, Engine::Sat, &ExtremalOptions::default());
        assert!(matches!(out, Err(Error::Rejected(_))));
    }
}
