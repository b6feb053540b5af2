//! `sumprod`: search, verify, extremal numbers, constructive traces, and the
//! SAT bridge from the command line.
//!
//! Exit codes: 0 witness or pass, 10 exhausted, 20 verification failure,
//! 64 usage error, 1 anything else.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use sumprod::coloring::{catalog_colorings, parse_coloring};
use sumprod::pattern::catalog_patterns;
use sumprod::pipeline::{
    dx_witness_constructive, prop31_trace, verify_trace, DxBudget, DxWitness, MChain,
    Prop31Params, Trace, TraceStatus,
};
use sumprod::sat::{
    decode_coloring, decode_assignment, encode_avoidance, monochromatic_in_range, parse_dimacs,
    parse_solver_output, solve_external, write_dimacs, CnfInstance, Model, SatResult,
    SolverConfig,
};
use sumprod::search::{pattern_search_parallel, verify_witness};
use sumprod::searchers::{
    largest_avoiding, verify_certificate, Engine, ExtremalCertificate, ExtremalOptions,
    ExtremalOutcome,
};
use sumprod::store::{write_atomic, ResultKind, RunConfig, Store, StoredResult};
use sumprod::{
    catalog_pattern, pattern_search, Coloring, Descriptor, Domain, Error, RationalMode,
    SearchBudget, SearchOutcome, Witness,
};

const EXIT_OK: u8 = 0;
const EXIT_EXHAUSTED: u8 = 10;
const EXIT_VERIFY: u8 = 20;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "sumprod", version, about = "Partition regularity search and verification")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search for a monochromatic instance of a pattern.
    Search(SearchArgs),
    /// Re-check a witness, certificate, trace, or stored result file.
    Verify(VerifyArgs),
    /// Compute a Schur / van der Waerden style extremal number.
    Number(NumberArgs),
    /// Run a constructive pipeline step by step.
    Trace(TraceArgs),
    /// Encode, solve, and decode avoidance instances.
    Sat {
        #[command(subcommand)]
        cmd: SatCmd,
    },
    /// List catalog patterns and colorings.
    Catalog {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Default)]
struct Common {
    /// Run configuration to start from; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Store results under this directory.
    #[arg(long)]
    store: Option<PathBuf>,
    /// Also write the JSON result here.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
struct ColoringArgs {
    /// Catalog coloring (see `sumprod catalog`).
    #[arg(long)]
    coloring: Option<String>,
    /// n, q+ or q.
    #[arg(long)]
    domain: Option<String>,
    /// Coloring descriptor as JSON.
    #[arg(long, conflicts_with = "coloring")]
    coloring_file: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    coloring: ColoringArgs,
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long)]
    distinct: bool,
    /// Rationals of size at most this bound.
    #[arg(long)]
    size_bound: Option<u64>,
    /// Inclusive integer range LO:HI; one for all variables or one per variable.
    #[arg(long = "range", value_name = "LO:HI")]
    ranges: Vec<String>,
    /// Skip assignments with a term above this value.
    #[arg(long)]
    max_value: Option<String>,
    #[arg(long)]
    node_cap: Option<u64>,
    #[arg(long)]
    wall_clock_ms: Option<u64>,
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct VerifyArgs {
    file: PathBuf,
    /// Node cap for re-checking refutations.
    #[arg(long, default_value_t = 50_000_000)]
    node_cap: u64,
}

#[derive(Args)]
struct NumberArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    pattern: Option<String>,
    #[arg(short, long)]
    k: Option<u32>,
    /// brute, sat or both.
    #[arg(long)]
    engine: Option<String>,
    #[arg(long)]
    distinct: bool,
    #[arg(long)]
    max_n: Option<u32>,
    #[arg(long)]
    node_cap: Option<u64>,
    /// Solver command line; the CNF path is appended.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    symmetry_breaking: bool,
    /// Recompute even when a cached result exists.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args)]
struct TraceArgs {
    /// prop31 or dx.
    kind: Option<String>,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    coloring: ColoringArgs,
    /// M0,M',M1,M2,M3.
    #[arg(long)]
    chain: Option<String>,
    #[arg(long)]
    bc_size_bound: Option<u64>,
    #[arg(long)]
    n_bound: Option<i64>,
    #[arg(long)]
    u_radius: Option<u32>,
    #[arg(long)]
    node_cap: Option<u64>,
    /// N for the dx construction.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    k_max: Option<u64>,
}

#[derive(Subcommand)]
enum SatCmd {
    /// Write the DIMACS encoding of "a k-coloring of [1..N] avoids the pattern".
    Encode {
        #[command(flatten)]
        inst: InstanceArgs,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run a solver on a DIMACS file.
    Solve {
        file: PathBuf,
        #[arg(long)]
        solver: Option<String>,
        #[arg(long)]
        timeout_ms: Option<u64>,
    },
    /// Turn solver output into a coloring of [1..N] and check it.
    Decode {
        #[command(flatten)]
        inst: InstanceArgs,
        /// Solver output (`s`/`v` lines).
        #[arg(long)]
        model: PathBuf,
    },
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long)]
    pattern: String,
    #[arg(short)]
    n: u32,
    #[arg(short, default_value_t = 2)]
    k: u32,
    #[arg(long)]
    distinct: bool,
    #[arg(long)]
    symmetry_breaking: bool,
}

/// Error carrying its exit code.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let code = match e {
            Error::Rejected(_) | Error::Pattern(_) | Error::Coloring(_) | Error::Arith(_) => EXIT_USAGE,
            Error::Sat(_) | Error::Io(_) => 1,
        };
        Fail(code, e.to_string())
    }
}

impl From<serde_json::Error> for Fail {
    fn from(e: serde_json::Error) -> Fail {
        Fail(1, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail(EXIT_USAGE, msg.into())
}

type Outcome = Result<u8, Fail>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let r = match cli.cmd {
        Cmd::Search(a) => cmd_search(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Number(a) => cmd_number(a),
        Cmd::Trace(a) => cmd_trace(a),
        Cmd::Sat { cmd } => cmd_sat(cmd),
        Cmd::Catalog { json } => cmd_catalog(json),
    };
    match r {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Fail> {
    let bytes = fs::read(path).map_err(|e| Fail(1, format!("{}: {e}", path.display())))?;
    serde_json::from_slice(&bytes).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn base_config(common: &Common, command: &str) -> Result<RunConfig, Fail> {
    let mut cfg = match &common.config {
        Some(p) => read_json::<RunConfig>(p)?,
        None => RunConfig::default(),
    };
    if !cfg.command.is_empty() && cfg.command != command {
        return Err(usage(format!("config is for `{}`, not `{command}`", cfg.command)));
    }
    cfg.command = command.to_string();
    if common.out.is_some() {
        cfg.output = common.out.clone();
    }
    Ok(cfg)
}

fn apply_coloring(cfg: &mut RunConfig, args: &ColoringArgs) -> Result<(), Fail> {
    let domain = match &args.domain {
        Some(d) => Some(Domain::parse(d).ok_or_else(|| usage(format!("unknown domain {d:?}")))?),
        None => None,
    };
    if let Some(p) = &args.coloring_file {
        cfg.coloring = Some(read_json::<Descriptor>(p)?);
    } else if let Some(spec) = &args.coloring {
        let desc = parse_coloring(spec, domain.unwrap_or(Domain::Naturals)).map_err(Error::from)?;
        cfg.coloring = Some(desc);
    } else if domain.is_some() {
        return Err(usage("--domain needs --coloring"));
    }
    Ok(())
}

fn param<T: serde::de::DeserializeOwned>(cfg: &RunConfig, key: &str) -> Option<T> {
    cfg.params.get(key).and_then(|v| serde_json::from_value(v.clone()).ok())
}

fn set_param(cfg: &mut RunConfig, key: &str, v: Value) {
    if !cfg.params.is_object() {
        cfg.params = json!({});
    }
    cfg.params[key] = v;
}

/// Pretty JSON with a trailing newline, to stdout and the configured output.
fn emit(cfg: &RunConfig, v: &impl serde::Serialize) -> Result<(), Fail> {
    let mut bytes = serde_json::to_vec_pretty(v)?;
    bytes.push(b'\n');
    if let Some(p) = &cfg.output {
        write_atomic(p, &bytes)?;
    }
    print!("{}", String::from_utf8_lossy(&bytes));
    Ok(())
}

fn store_result(common: &Common, cfg: &RunConfig, kind: ResultKind, payload: Value) -> Result<(), Fail> {
    if let Some(root) = &common.store {
        let path = Store::new(root).put(cfg, kind, payload)?;
        eprintln!("stored {}", path.display());
    }
    Ok(())
}

fn parse_range(s: &str) -> Result<(i64, i64), Fail> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| usage(format!("range {s:?} is not LO:HI")))?;
    let lo = lo.trim().parse().map_err(|_| usage(format!("bad range start in {s:?}")))?;
    let hi = hi.trim().parse().map_err(|_| usage(format!("bad range end in {s:?}")))?;
    Ok((lo, hi))
}

fn cmd_search(a: SearchArgs) -> Outcome {
    let mut cfg = base_config(&a.common, "search")?;
    apply_coloring(&mut cfg, &a.coloring)?;
    if let Some(p) = &a.pattern {
        cfg.pattern = Some(p.clone());
    }
    cfg.distinct |= a.distinct;
    let node_cap = a
        .node_cap
        .or(cfg.budget.as_ref().map(|b| b.node_cap))
        .unwrap_or(10_000_000);
    let coloring_desc = cfg.coloring.clone().ok_or_else(|| usage("--coloring is required"))?;
    let mut budget = if !a.ranges.is_empty() {
        let ranges = a.ranges.iter().map(|r| parse_range(r)).collect::<Result<_, _>>()?;
        SearchBudget::integers(ranges, node_cap)
    } else if let Some(s) = a.size_bound {
        let coloring = Coloring::from_descriptor(&coloring_desc).map_err(Error::from)?;
        let mode = match coloring.domain() {
            Domain::NonzeroRationals => RationalMode::FullNonzero,
            _ => RationalMode::PositiveOnly,
        };
        SearchBudget::rationals(s, mode, node_cap)
    } else if let Some(b) = cfg.budget.clone() {
        b
    } else {
        return Err(usage("give --size-bound or --range"));
    };
    budget.node_cap = node_cap;
    if let Some(v) = &a.max_value {
        budget.max_value = Some(v.parse().map_err(|_| usage(format!("bad --max-value {v:?}")))?);
    }
    if a.wall_clock_ms.is_some() {
        budget.wall_clock_ms = a.wall_clock_ms;
    }
    cfg.budget = Some(budget);
    if a.parallel {
        set_param(&mut cfg, "parallel", json!(true));
    }
    let (code, outcome) = run_search(&cfg)?;
    emit(&cfg, &outcome)?;
    let kind = if outcome.is_found() { ResultKind::Witness } else { ResultKind::Exhausted };
    store_result(&a.common, &cfg, kind, serde_json::to_value(&outcome)?)?;
    Ok(code)
}

fn run_search(cfg: &RunConfig) -> Result<(u8, SearchOutcome), Fail> {
    let name = cfg.pattern.as_deref().ok_or_else(|| usage("--pattern is required"))?;
    let pattern = catalog_pattern(name).map_err(Error::from)?.with_distinct(cfg.distinct);
    let desc = cfg.coloring.as_ref().ok_or_else(|| usage("--coloring is required"))?;
    let coloring = Coloring::from_descriptor(desc).map_err(Error::from)?;
    let budget = cfg.budget.as_ref().ok_or_else(|| usage("no search budget"))?;
    let outcome = if param::<bool>(cfg, "parallel") == Some(true) {
        pattern_search_parallel(&coloring, &pattern, budget)?
    } else {
        pattern_search(&coloring, &pattern, budget)?
    };
    let code = if outcome.is_found() { EXIT_OK } else { EXIT_EXHAUSTED };
    Ok((code, outcome))
}

fn verified(what: &str) -> Outcome {
    println!("ok: {what}");
    Ok(EXIT_OK)
}

fn rejected(what: &str, why: impl std::fmt::Display) -> Outcome {
    println!("FAILED: {what}: {why}");
    Ok(EXIT_VERIFY)
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    let v: Value = read_json(&a.file)?;
    verify_value(v, a.node_cap)
}

fn verify_value(v: Value, node_cap: u64) -> Outcome {
    if v.get("config_hash").is_some() {
        let stored: StoredResult = serde_json::from_value(v)?;
        if stored.config.hash() != stored.config_hash {
            return rejected("stored result", "config hash does not match its config");
        }
        if stored.kind == ResultKind::Exhausted && stored.config.command == "search" {
            let (_, fresh) = run_search(&stored.config)?;
            return if serde_json::to_value(&fresh)? == stored.payload {
                verified("exhaustion reproduced")
            } else {
                rejected("stored exhaustion", "fresh search disagrees")
            };
        }
        return verify_value(stored.payload, node_cap);
    }
    match v.get("outcome").and_then(Value::as_str) {
        Some("found") => {
            let SearchOutcome::Found(w) = serde_json::from_value(v)? else {
                return Err(usage("malformed witness"));
            };
            return verify_search_witness(&w);
        }
        Some("exhausted") => {
            return Err(usage("an exhaustion report has nothing to re-check; verify the stored result instead"));
        }
        Some("exact") => {
            let ExtremalOutcome::Exact(c) = serde_json::from_value(v)? else {
                return Err(usage("malformed certificate"));
            };
            return verify_cert(&c, node_cap);
        }
        Some("partial") => {
            let ExtremalOutcome::Partial { pattern, colors, avoiding_coloring, .. } = serde_json::from_value(v)? else {
                return Err(usage("malformed partial result"));
            };
            let p = catalog_pattern(&pattern).map_err(Error::from)?;
            let c = sumprod::sat::coloring_from_assignment(&avoiding_coloring, colors)?;
            return match monochromatic_in_range(&c, &p, avoiding_coloring.len() as u32)? {
                None => verified(&format!("avoiding coloring of [1..{}]", avoiding_coloring.len())),
                Some(x) => rejected("avoiding coloring", format!("monochromatic at {x:?}")),
            };
        }
        _ => {}
    }
    if v.get("refutations").is_some() {
        let c: ExtremalCertificate = serde_json::from_value(v)?;
        return verify_cert(&c, node_cap);
    }
    if v.get("steps").is_some() {
        let t: Trace = serde_json::from_value(v)?;
        return verify_trace_file(&t);
    }
    if v.get("trace").is_some() {
        let w: DxWitness = serde_json::from_value(v)?;
        let p = catalog_pattern("dx-d2").map_err(Error::from)?;
        let f = Coloring::from_descriptor(&w.trace.coloring).map_err(Error::from)?;
        if sumprod::is_monochromatic(&f, &p, &[w.d.clone(), w.x.clone()])?.is_none() {
            return rejected("dx witness", format!("D = {}, X = {} is not monochromatic", w.d, w.x));
        }
        return verify_trace_file(&w.trace);
    }
    if v.get("assignment").is_some() {
        let w: Witness = serde_json::from_value(v)?;
        return verify_search_witness(&w);
    }
    Err(usage("unrecognized file: expected a witness, certificate, trace, or stored result"))
}

fn verify_search_witness(w: &Witness) -> Outcome {
    match verify_witness(w) {
        Ok(()) => verified(&format!("{} witness {:?}", w.pattern, w.assignment.iter().map(ToString::to_string).collect::<Vec<_>>())),
        Err(f) => rejected("witness", f),
    }
}

fn verify_cert(c: &ExtremalCertificate, node_cap: u64) -> Outcome {
    match verify_certificate(c, node_cap) {
        Ok(()) => verified(&format!(
            "{} with {} colors: largest avoiding N = {}, forced at {}",
            c.pattern,
            c.colors,
            c.largest_avoiding,
            c.forcing_n()
        )),
        Err(e) => rejected("certificate", e),
    }
}

fn verify_trace_file(t: &Trace) -> Outcome {
    match verify_trace(t) {
        Ok(n) => verified(&format!("{} trace, {n} step checks replayed, status {}", t.kind, status_name(&t.status))),
        Err(e) => rejected("trace", e),
    }
}

fn status_name(s: &TraceStatus) -> &'static str {
    match s {
        TraceStatus::Complete => "complete",
        TraceStatus::Exhausted { .. } => "exhausted",
        TraceStatus::CheckFailed { .. } => "check-failed",
    }
}

/// `--solver`, then the environment, then the config, then `sumprod-sat`
/// next to this executable.
fn resolve_solver(explicit: Option<&SolverConfig>) -> Option<SolverConfig> {
    explicit.cloned().or_else(SolverConfig::from_env).or_else(|| {
        let exe = std::env::current_exe().ok()?;
        let sib = exe.with_file_name(format!("sumprod-sat{}", std::env::consts::EXE_SUFFIX));
        sib.exists().then(|| SolverConfig::new(sib.to_string_lossy()))
    })
}

fn cmd_number(a: NumberArgs) -> Outcome {
    let mut cfg = base_config(&a.common, "number")?;
    if let Some(p) = &a.pattern {
        cfg.pattern = Some(p.clone());
    }
    cfg.distinct |= a.distinct;
    if let Some(e) = &a.engine {
        cfg.engine = Some(e.clone());
    }
    if let Some(s) = &a.solver {
        cfg.solver = Some(SolverConfig::from_command_line(s).ok_or_else(|| usage("empty --solver"))?);
    }
    if let Some(k) = a.k {
        set_param(&mut cfg, "k", json!(k));
    }
    if let Some(n) = a.max_n {
        set_param(&mut cfg, "max_n", json!(n));
    }
    if let Some(n) = a.node_cap {
        set_param(&mut cfg, "node_cap", json!(n));
    }
    if a.symmetry_breaking {
        set_param(&mut cfg, "symmetry_breaking", json!(true));
    }
    let name = cfg.pattern.clone().ok_or_else(|| usage("--pattern is required"))?;
    let engine_name = cfg.engine.get_or_insert_with(|| "both".into()).clone();
    let engine = Engine::parse(&engine_name).ok_or_else(|| usage(format!("unknown engine {engine_name:?}")))?;
    let k: u32 = param(&cfg, "k").unwrap_or(2);
    set_param(&mut cfg, "k", json!(k));

    let store = Store::new(a.common.store.clone().unwrap_or_else(|| PathBuf::from("sumprod-runs")));
    let cached = if a.no_cache { None } else { store.get(&cfg)? };
    let outcome: ExtremalOutcome = match cached {
        Some(hit) => {
            eprintln!("cache hit {}", store.result_path(&cfg.hash()).display());
            serde_json::from_value(hit.payload)?
        }
        None => {
            let pattern = catalog_pattern(&name).map_err(Error::from)?.with_distinct(cfg.distinct);
            let defaults = ExtremalOptions::default();
            let opts = ExtremalOptions {
                max_n: param(&cfg, "max_n").unwrap_or(defaults.max_n),
                node_cap: param(&cfg, "node_cap").unwrap_or(defaults.node_cap),
                solver: if engine == Engine::Brute { None } else { resolve_solver(cfg.solver.as_ref()) },
                symmetry_breaking: param(&cfg, "symmetry_breaking").unwrap_or(false),
            };
            if engine != Engine::Brute && opts.solver.is_none() {
                return Err(usage(format!("no SAT solver: pass --solver or set {}", sumprod::sat::SOLVER_ENV)));
            }
            let outcome = largest_avoiding(&pattern, k, engine, &opts)?;
            let kind = match outcome {
                ExtremalOutcome::Exact(_) => ResultKind::ExtremalNumber,
                ExtremalOutcome::Partial { .. } => ResultKind::Exhausted,
            };
            let path = store.put(&cfg, kind, serde_json::to_value(&outcome)?)?;
            if let ExtremalOutcome::Exact(c) = &outcome {
                let mut bytes = serde_json::to_vec_pretty(c)?;
                bytes.push(b'\n');
                store.put_artifact(&cfg, "certificate.json", &bytes)?;
                let coloring = json!({ "n": c.largest_avoiding, "colors": c.colors, "coloring": c.avoiding_coloring });
                store.put_artifact(&cfg, "avoiding-coloring.json", serde_json::to_string_pretty(&coloring)?.as_bytes())?;
                let refs = serde_json::to_vec_pretty(&c.refutations)?;
                store.put_artifact(&cfg, "refutations.json", &refs)?;
            }
            eprintln!("stored {}", path.display());
            outcome
        }
    };
    if let Some(p) = &cfg.output {
        let mut bytes = serde_json::to_vec_pretty(&outcome)?;
        bytes.push(b'\n');
        write_atomic(p, &bytes)?;
    }
    match &outcome {
        ExtremalOutcome::Exact(c) => {
            println!(
                "pattern={} k={} engine={} largest_avoiding={} forcing_n={}",
                c.pattern,
                c.colors,
                c.engine.name(),
                c.largest_avoiding,
                c.forcing_n()
            );
            Ok(EXIT_OK)
        }
        ExtremalOutcome::Partial { pattern, colors, engine, lower, reason, .. } => {
            println!(
                "pattern={pattern} k={colors} engine={} largest_avoiding>={lower} partial: {reason}",
                engine.name()
            );
            Ok(EXIT_EXHAUSTED)
        }
    }
}

fn parse_chain(s: &str) -> Result<MChain, Fail> {
    let v: Vec<u64> = s
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| usage(format!("bad --chain {s:?}"))))
        .collect::<Result<_, _>>()?;
    let [m0, m_prime, m1, m2, m3] = v[..] else {
        return Err(usage("--chain takes five values M0,M',M1,M2,M3"));
    };
    Ok(MChain { m0, m_prime, m1, m2, m3 })
}

fn cmd_trace(a: TraceArgs) -> Outcome {
    let mut cfg = base_config(&a.common, "trace")?;
    apply_coloring(&mut cfg, &a.coloring)?;
    let kind = a
        .kind
        .clone()
        .or_else(|| param(&cfg, "kind"))
        .ok_or_else(|| usage("trace kind (prop31 or dx) is required"))?;
    set_param(&mut cfg, "kind", json!(kind));
    let desc = cfg.coloring.clone().ok_or_else(|| usage("--coloring is required"))?;
    let coloring = Coloring::from_descriptor(&desc).map_err(Error::from)?;
    let trace = match kind.as_str() {
        "prop31" => {
            let mut p: Prop31Params = param(&cfg, "prop31").unwrap_or_default();
            if let Some(c) = &a.chain {
                p.chain = parse_chain(c)?;
            }
            p.bc_size_bound = a.bc_size_bound.unwrap_or(p.bc_size_bound);
            p.n_bound = a.n_bound.unwrap_or(p.n_bound);
            p.u_radius = a.u_radius.unwrap_or(p.u_radius);
            p.node_cap = a.node_cap.unwrap_or(p.node_cap);
            set_param(&mut cfg, "prop31", serde_json::to_value(&p)?);
            let t = prop31_trace(&coloring, &p)?;
            emit(&cfg, &t)?;
            t
        }
        "dx" => {
            let n = a.n.or_else(|| param(&cfg, "n")).unwrap_or(5);
            let mut b: DxBudget = param(&cfg, "dx").unwrap_or_default();
            b.k_max = a.k_max.unwrap_or(b.k_max);
            set_param(&mut cfg, "n", json!(n));
            set_param(&mut cfg, "dx", serde_json::to_value(&b)?);
            match dx_witness_constructive(&coloring, n, &b)? {
                Ok(w) => {
                    emit(&cfg, &w)?;
                    w.trace
                }
                Err(t) => {
                    emit(&cfg, &t)?;
                    t
                }
            }
        }
        other => return Err(usage(format!("unknown trace kind {other:?}"))),
    };
    eprint!("{}", trace.log());
    store_result(&a.common, &cfg, ResultKind::Trace, serde_json::to_value(&trace)?)?;
    Ok(match trace.status {
        TraceStatus::Complete => EXIT_OK,
        TraceStatus::Exhausted { .. } => EXIT_EXHAUSTED,
        TraceStatus::CheckFailed { .. } => EXIT_VERIFY,
    })
}

fn instance(a: &InstanceArgs) -> Result<CnfInstance, Fail> {
    let p = catalog_pattern(&a.pattern).map_err(Error::from)?.with_distinct(a.distinct);
    Ok(encode_avoidance(a.n, a.k, &p, a.symmetry_breaking)?)
}

fn cmd_sat(cmd: SatCmd) -> Outcome {
    match cmd {
        SatCmd::Encode { inst, out } => {
            let bytes = write_dimacs(&instance(&inst)?);
            match out {
                Some(p) => write_atomic(&p, &bytes)?,
                None => print!("{}", String::from_utf8_lossy(&bytes)),
            }
            Ok(EXIT_OK)
        }
        SatCmd::Solve { file, solver, timeout_ms } => {
            let bytes = fs::read(&file).map_err(|e| Fail(1, format!("{}: {e}", file.display())))?;
            let (num_vars, clauses) = parse_dimacs(&bytes)?;
            let inst = CnfInstance {
                num_vars,
                clauses,
                n: 0,
                colors: 0,
                pattern: String::new(),
                distinct: false,
            };
            let explicit = solver.as_deref().and_then(SolverConfig::from_command_line);
            let mut cfg = resolve_solver(explicit.as_ref())
                .ok_or_else(|| usage(format!("no SAT solver: pass --solver or set {}", sumprod::sat::SOLVER_ENV)))?;
            if let Some(t) = timeout_ms {
                cfg.timeout_ms = t;
            }
            match solve_external(&inst, &cfg)? {
                SatResult::Sat(m) => {
                    let lits: Vec<String> = m.to_literals(num_vars).iter().map(i32::to_string).collect();
                    println!("s SATISFIABLE\nv {} 0", lits.join(" "));
                    Ok(EXIT_OK)
                }
                SatResult::Unsat => {
                    println!("s UNSATISFIABLE");
                    Ok(EXIT_EXHAUSTED)
                }
                SatResult::Unknown(why) => {
                    println!("s UNKNOWN");
                    eprintln!("{why}");
                    Ok(EXIT_EXHAUSTED)
                }
            }
        }
        SatCmd::Decode { inst, model } => {
            let cnf = instance(&inst)?;
            let text = fs::read_to_string(&model).map_err(|e| Fail(1, format!("{}: {e}", model.display())))?;
            let m: Model = match parse_solver_output(&text)? {
                SatResult::Sat(m) => m,
                other => return Err(usage(format!("no model in {}: {other:?}", model.display()))),
            };
            let colors = match decode_assignment(&cnf, &m) {
                Ok(c) => c,
                Err(e) => return rejected("model", e),
            };
            if let Err(e) = decode_coloring(&cnf, &m) {
                return rejected("decoded coloring", e);
            }
            println!("{}", json!({ "pattern": cnf.pattern, "n": cnf.n, "colors": cnf.colors, "coloring": colors }));
            Ok(EXIT_OK)
        }
    }
}

fn cmd_catalog(as_json: bool) -> Outcome {
    let patterns = catalog_patterns();
    let colorings = catalog_colorings();
    if as_json {
        let v = json!({
            "patterns": patterns.iter().map(|(n, d)| json!({"name": n, "description": d})).collect::<Vec<_>>(),
            "colorings": colorings.iter().map(|(n, d)| json!({"name": n, "description": d})).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        println!("patterns:");
        for (n, d) in patterns {
            println!("  {n:<20} {d}");
        }
        println!("colorings:");
        for (n, d) in colorings {
            println!("  {n:<24} {d}");
        }
    }
    Ok(EXIT_OK)
}
