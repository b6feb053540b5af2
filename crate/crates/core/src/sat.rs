//! CNF encodings of pattern-avoiding colorings of `[1..N]`, DIMACS I/O,
//! and a client for external SAT solvers speaking the competition output
//! format (`s SATISFIABLE` / `v ... 0`).

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::coloring::{table_coloring, Coloring, Domain};
use crate::error::Error;
use crate::pattern::{catalog_pattern, Pattern};
use crate::search::{pattern_search, SearchBudget, SearchOutcome};
use crate::searchers::instantiations;

/// Environment variable naming the solver command (whitespace-separated
/// arguments allowed).
pub const SOLVER_ENV: &str = "SUMPROD_SAT_SOLVER";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfInstance {
    pub num_vars: u32,
    pub clauses: Vec<Vec<i32>>,
    pub n: u32,
    pub colors: u32,
    pub pattern: String,
    #[serde(default)]
    pub distinct: bool,
}

impl CnfInstance {
    /// Variable for "number `m` has color `c`" with `m` in `1..=n` and
    /// `c` in `0..colors`; equals `(m-1)*k + c` with colors counted from one.
    pub fn var(&self, m: u32, c: u32) -> i32 {
        var_id(self.colors, m, c)
    }

    /// True when every clause has a true literal under `model`.
    pub fn satisfied_by(&self, model: &Model) -> Result<(), Vec<i32>> {
        for clause in &self.clauses {
            if !clause.iter().any(|&l| model.value(l)) {
                return Err(clause.clone());
            }
        }
        Ok(())
    }
}

fn var_id(colors: u32, m: u32, c: u32) -> i32 {
    ((m - 1) * colors + c + 1) as i32
}

/// Encode "some `colors`-coloring of `[1..n]` has no monochromatic instance
/// of `pattern`" as CNF.
pub fn encode_avoidance(
    n: u32,
    colors: u32,
    pattern: &Pattern,
    symmetry_breaking: bool,
) -> Result<CnfInstance, Error> {
    if !pattern.is_integer_valued() {
        return Err(Error::Rejected(format!(
            "pattern {} is not integer-valued",
            pattern.name()
        )));
    }
    if colors == 0 {
        return Err(Error::Rejected("at least one color required".into()));
    }
    let mut clauses = Vec::new();
    for m in 1..=n {
        clauses.push((0..colors).map(|c| var_id(colors, m, c)).collect());
        for c1 in 0..colors {
            for c2 in c1 + 1..colors {
                clauses.push(vec![-var_id(colors, m, c1), -var_id(colors, m, c2)]);
            }
        }
    }
    if symmetry_breaking && n >= 1 {
        clauses.push(vec![var_id(colors, 1, 0)]);
    }
    for set in instantiations(pattern, n)? {
        for c in 0..colors {
            clauses.push(set.iter().map(|&m| -var_id(colors, m, c)).collect());
        }
    }
    Ok(CnfInstance {
        num_vars: n * colors,
        clauses,
        n,
        colors,
        pattern: pattern.name().to_string(),
        distinct: pattern.constraints().distinct,
    })
}

/// Standard DIMACS CNF: `p cnf <vars> <clauses>` then one 0-terminated
/// clause per line.
pub fn write_dimacs(inst: &CnfInstance) -> Vec<u8> {
    let mut s = format!("p cnf {} {}\n", inst.num_vars, inst.clauses.len());
    for clause in &inst.clauses {
        for l in clause {
            write!(s, "{l} ").expect("write to string");
        }
        s.push_str("0\n");
    }
    s.into_bytes()
}

/// Parse DIMACS CNF into `(num_vars, clauses)`.
pub fn parse_dimacs(bytes: &[u8]) -> Result<(u32, Vec<Vec<i32>>), Error> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Sat(e.to_string()))?;
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(Error::Sat(format!("bad header {line:?}")));
            }
            let v = parts[2].parse().map_err(|_| Error::Sat(format!("bad header {line:?}")))?;
            let c = parts[3].parse().map_err(|_| Error::Sat(format!("bad header {line:?}")))?;
            header = Some((v, c));
            continue;
        }
        for tok in line.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| Error::Sat(format!("bad literal {tok:?}")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(lit);
            }
        }
    }
    let (vars, count) = header.ok_or_else(|| Error::Sat("missing header".into()))?;
    if !current.is_empty() || clauses.len() != count {
        return Err(Error::Sat(format!(
            "header declares {count} clauses, found {}",
            clauses.len()
        )));
    }
    Ok((vars, clauses))
}

/// Truth assignment; unlisted variables are false.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Model {
    pub true_vars: HashSet<u32>,
}

impl Model {
    pub fn from_literals(lits: &[i32]) -> Model {
        Model {
            true_vars: lits.iter().filter(|&&l| l > 0).map(|&l| l as u32).collect(),
        }
    }

    pub fn value(&self, lit: i32) -> bool {
        let on = self.true_vars.contains(&lit.unsigned_abs());
        if lit > 0 {
            on
        } else {
            !on
        }
    }

    pub fn to_literals(&self, num_vars: u32) -> Vec<i32> {
        (1..=num_vars)
            .map(|v| if self.true_vars.contains(&v) { v as i32 } else { -(v as i32) })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat(Model),
    Unsat,
    Unknown(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub command: String,
    #[serde(default)]
    pub args: Vec<String>,
    #[serde(default = "default_timeout")]
    pub timeout_ms: u64,
}

fn default_timeout() -> u64 {
    60_000
}

impl SolverConfig {
    pub fn new(command: impl Into<String>) -> SolverConfig {
        SolverConfig {
            command: command.into(),
            args: Vec::new(),
            timeout_ms: default_timeout(),
        }
    }

    /// Parse a whitespace-separated command line.
    pub fn from_command_line(line: &str) -> Option<SolverConfig> {
        let mut parts = line.split_whitespace().map(String::from);
        let command = parts.next()?;
        Some(SolverConfig {
            command,
            args: parts.collect(),
            timeout_ms: default_timeout(),
        })
    }

    /// The solver named by the environment, if any.
    pub fn from_env() -> Option<SolverConfig> {
        std::env::var(SOLVER_ENV)
            .ok()
            .and_then(|s| SolverConfig::from_command_line(&s))
    }
}

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

fn temp_path(tag: &str) -> PathBuf {
    let n = TEMP_COUNTER.fetch_add(1, Ordering::Relaxed);
    std::env::temp_dir().join(format!("sumprod-{}-{n}-{tag}", std::process::id()))
}

struct TempFile(PathBuf);

impl Drop for TempFile {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

/// Run the configured solver on the instance. The DIMACS file path is
/// passed as the last argument; stdout is parsed per the SAT-competition
/// convention.
pub fn solve_external(inst: &CnfInstance, solver: &SolverConfig) -> Result<SatResult, Error> {
    let cnf = TempFile(temp_path("in.cnf"));
    let out = TempFile(temp_path("out.txt"));
    fs::write(&cnf.0, write_dimacs(inst))?;
    let stdout = fs::File::create(&out.0)?;
    let mut child = Command::new(&solver.command)
        .args(&solver.args)
        .arg(&cnf.0)
        .stdin(Stdio::null())
        .stdout(stdout)
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| Error::Sat(format!("cannot start solver {:?}: {e}", solver.command)))?;
    let deadline = Instant::now() + Duration::from_millis(solver.timeout_ms);
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if Instant::now() >= deadline {
            let _ = child.kill();
            let _ = child.wait();
            return Ok(SatResult::Unknown(format!("timeout after {} ms", solver.timeout_ms)));
        }
        std::thread::sleep(Duration::from_millis(2));
    };
    let text = fs::read_to_string(&out.0)?;
    if status.code().is_none() {
        return Ok(SatResult::Unknown(format!("solver terminated by signal ({status})")));
    }
    let result = parse_solver_output(&text)?;
    if let SatResult::Sat(model) = &result {
        if let Err(clause) = inst.satisfied_by(model) {
            return Err(Error::Sat(format!("solver model violates clause {clause:?}")));
        }
    }
    Ok(result)
}

/// Parse `s ...` and `v ...` lines.
pub fn parse_solver_output(text: &str) -> Result<SatResult, Error> {
    let mut status = None;
    let mut lits = Vec::new();
    let mut terminated = false;
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("v ") {
            for tok in rest.split_whitespace() {
                let l: i32 = tok
                    .parse()
                    .map_err(|_| Error::Sat(format!("bad model literal {tok:?}")))?;
                if l == 0 {
                    terminated = true;
                } else {
                    lits.push(l);
                }
            }
        }
    }
    match status.as_deref() {
        Some("SATISFIABLE") => {
            if !terminated {
                return Err(Error::Sat("SATISFIABLE without a terminated model".into()));
            }
            Ok(SatResult::Sat(Model::from_literals(&lits)))
        }
        Some("UNSATISFIABLE") => Ok(SatResult::Unsat),
        Some("UNKNOWN") => Ok(SatResult::Unknown("solver reported UNKNOWN".into())),
        Some(other) => Err(Error::Sat(format!("unexpected status line {other:?}"))),
        None => Err(Error::Sat("no status line in solver output".into())),
    }
}

/// Colors of `1..=n` read from a model, after checking every clause.
pub fn decode_assignment(inst: &CnfInstance, model: &Model) -> Result<Vec<u32>, Error> {
    if let Err(clause) = inst.satisfied_by(model) {
        return Err(Error::Sat(format!("model violates clause {clause:?}")));
    }
    (1..=inst.n)
        .map(|m| {
            let on: Vec<u32> = (0..inst.colors)
                .filter(|&c| model.value(inst.var(m, c)))
                .collect();
            match on.as_slice() {
                [c] => Ok(*c),
                _ => Err(Error::Sat(format!("number {m} has colors {on:?}"))),
            }
        })
        .collect()
}

/// Table coloring of `[1..n]` decoded from a verified model, re-checked by
/// the pattern search to contain no monochromatic instance in range.
pub fn decode_coloring(inst: &CnfInstance, model: &Model) -> Result<Coloring, Error> {
    let colors = decode_assignment(inst, model)?;
    let coloring = coloring_from_assignment(&colors, inst.colors)?;
    let pattern = catalog_pattern(&inst.pattern)?.with_distinct(inst.distinct);
    if let Some(w) = monochromatic_in_range(&coloring, &pattern, inst.n)? {
        return Err(Error::Sat(format!(
            "decoded coloring has a monochromatic instance at {:?}",
            w
        )));
    }
    Ok(coloring)
}

/// Table coloring of `1..=colors.len()`.
pub fn coloring_from_assignment(colors: &[u32], palette: u32) -> Result<Coloring, Error> {
    Ok(table_coloring(
        Domain::Naturals,
        palette.max(1),
        colors
            .iter()
            .enumerate()
            .map(|(i, &c)| (Rational::from(i as i64 + 1), c)),
        0,
    )?)
}

/// First monochromatic instance with every value in `[1..n]`, via the
/// generic pattern search.
pub fn monochromatic_in_range(
    coloring: &Coloring,
    pattern: &Pattern,
    n: u32,
) -> Result<Option<Vec<Rational>>, Error> {
    if n == 0 {
        return Ok(None);
    }
    let budget = SearchBudget::integers(vec![(1, n as i64)], u64::MAX).with_max_value(n as i64);
    Ok(match pattern_search(coloring, pattern, &budget)? {
        SearchOutcome::Found(w) => Some(w.assignment),
        SearchOutcome::Exhausted(_) => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schur() -> Pattern {
        catalog_pattern("schur").unwrap()
    }

    #[test]
    fn dimacs_bytes() {
        let empty = CnfInstance {
            num_vars: 0,
            clauses: vec![],
            n: 0,
            colors: 1,
            pattern: "schur".into(),
            distinct: false,
        };
        assert_eq!(write_dimacs(&empty), b"p cnf 0 0\n");
        let one = CnfInstance {
            num_vars: 1,
            clauses: vec![vec![1]],
            ..empty
        };
        assert_eq!(write_dimacs(&one), b"p cnf 1 1\n1 0\n");
    }

    #[test]
    fn dimacs_round_trip() {
        let inst = encode_avoidance(9, 3, &schur(), false).unwrap();
        let bytes = write_dimacs(&inst);
        let (vars, clauses) = parse_dimacs(&bytes).unwrap();
        assert_eq!(vars, inst.num_vars);
        let mut a = clauses.clone();
        let mut b = inst.clauses.clone();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(write_dimacs(&inst), bytes);
    }

    #[test]
    fn variable_numbering() {
        let inst = encode_avoidance(3, 2, &schur(), false).unwrap();
        assert_eq!(inst.var(1, 0), 1);
        assert_eq!(inst.var(1, 1), 2);
        assert_eq!(inst.var(3, 1), 6);
        assert_eq!(inst.num_vars, 6);
    }

    #[test]
    fn rejects_non_integer_patterns() {
        let p = catalog_pattern("conj-6.3").unwrap();
        assert!(encode_avoidance(5, 2, &p, false).is_err());
    }

    #[test]
    fn vacuous_instance_has_only_color_clauses() {
        let inst = encode_avoidance(1, 3, &catalog_pattern("vdw3").unwrap(), false).unwrap();
        // one at-least-one clause and three at-most-one clauses
        assert_eq!(inst.clauses.len(), 4);
    }

    #[test]
    fn solver_output_parsing() {
        let sat = parse_solver_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n").unwrap();
        assert_eq!(sat, SatResult::Sat(Model::from_literals(&[1, -2, 3])));
        assert_eq!(parse_solver_output("s UNSATISFIABLE\n").unwrap(), SatResult::Unsat);
        assert!(parse_solver_output("garbage").is_err());
        assert!(parse_solver_output("s SATISFIABLE\nv 1 2\n").is_err());
        assert!(matches!(parse_solver_output("s UNKNOWN").unwrap(), SatResult::Unknown(_)));
    }

    #[test]
    fn decode_checks_model() {
        let inst = encode_avoidance(4, 2, &schur(), false).unwrap();
        // 1,4 -> color 0; 2,3 -> color 1
        let good = Model::from_literals(&[1, 4, 6, 7]);
        let c = decode_coloring(&inst, &good).unwrap();
        assert_eq!(c.color_int(2).unwrap().0, 1);
        // number 1 gets both colors
        let bad = Model::from_literals(&[1, 2, 4, 6, 7]);
        assert!(decode_coloring(&inst, &bad).is_err());
        // 1 and 2 share a color: 1+1=2 is monochromatic
        let mono = Model::from_literals(&[1, 3, 6, 7]);
        assert!(decode_coloring(&inst, &mono).is_err());
    }

    #[cfg(unix)]
    #[test]
    fn missing_solver_is_an_error() {
        let inst = encode_avoidance(2, 2, &schur(), false).unwrap();
        let cfg = SolverConfig::new("/nonexistent/solver");
        assert!(matches!(solve_external(&inst, &cfg), Err(Error::Sat(_))));
    }

    #[cfg(unix)]
    #[test]
    fn shell_solver_protocol() {
        let inst = encode_avoidance(2, 1, &schur(), false).unwrap();
        let sh = |script: &str| SolverConfig {
            command: "sh".into(),
            args: vec!["-c".into(), script.into(), "solver".into()],
            timeout_ms: 2_000,
        };
        assert_eq!(solve_external(&inst, &sh("echo 's UNSATISFIABLE'")).unwrap(), SatResult::Unsat);
        // a model that violates the at-least-one clauses is a protocol error
        assert!(solve_external(&inst, &sh("echo 's SATISFIABLE'; echo 'v -1 -2 0'")).is_err());
        assert!(solve_external(&inst, &sh("echo nothing")).is_err());
        let slow = SolverConfig {
            timeout_ms: 100,
            ..sh("sleep 5")
        };
        assert!(matches!(solve_external(&inst, &slow).unwrap(), SatResult::Unknown(_)));
        assert!(matches!(
            solve_external(&inst, &sh("kill -9 $$")).unwrap(),
            SatResult::Unknown(_)
        ));
    }
}
