//! `powers-cert`: certified norm brackets, Powers-averaging certificates and
//! Dixmier averaging from the command line. Every command prints a JSON
//! [`report::RunReport`] on stdout.
//!
//! Exit codes: 0 success, 1 negative answer (not found, invalid, failed),
//! 2 invalid input, 3 budget exceeded, 4 internal or I/O failure.

mod bench;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use powers_core::numeric::parse_rational;
use powers_core::powers::{
    dixmier_average, search_certificate, verify_certificate_detailed, Certificate, PoolStrategy, SearchConfig,
    SearchOutcome,
};
use powers_core::{estimate, parse_element, AnyElement, BoundConfig, Error, ExactElement, GroupDescriptor};
use report::RunReport;
use serde::de::DeserializeOwned;
use serde::Serialize;

const THREADS_VAR: &str = "POWERS_CERT_THREADS";

#[derive(Parser)]
#[command(name = "powers-cert", version, about = "Certified reduced C*-norm bounds and Powers-averaging certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certified two-sided bracket on the reduced norm of an element.
    Norm {
        #[command(flatten)]
        element: ElementArgs,
        #[command(flatten)]
        bounds: BoundArgs,
        /// JSON bound configuration; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for conjugators whose averages of the targets are small in norm.
    Search {
        /// Group descriptor, e.g. F2 or F2xZ.
        #[arg(long)]
        group: String,
        /// Target words, comma separated or repeated.
        #[arg(long, required = true, value_delimiter = ',')]
        targets: Vec<String>,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the certificate to this file when one is found.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-derive the bounds in a certificate file.
    Verify {
        /// Certificate JSON file.
        certificate: PathBuf,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Greedy averaging of an element over conjugation by group elements.
    Dixmier {
        #[command(flatten)]
        element: ElementArgs,
        #[command(flatten)]
        search: SearchArgs,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run built-in benchmark suites and emit a pass/fail table.
    Bench {
        /// One of: all, kesten, two-generators, certificate, multi-target,
        /// radical, cone, dixmier, soundness.
        #[arg(default_value = "all")]
        suite: String,
        /// Randomized cases for the cone and soundness suites.
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        /// Wall-time limit per suite in milliseconds, replacing the defaults.
        #[arg(long)]
        max_ms: Option<u128>,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ElementArgs {
    /// Group descriptor such as F2, Z3 or F2xZ; optional for JSON element files.
    #[arg(long)]
    group: Option<String>,
    /// Element in inline syntax, e.g. "(1/4)(a + A + b + B)".
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    element: Option<String>,
    /// File holding an element as JSON or inline syntax.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    /// Ball radius for power iteration.
    #[arg(long)]
    radius: Option<usize>,
    /// Power-iteration steps.
    #[arg(long)]
    iters: Option<usize>,
    /// Deepest trace moment.
    #[arg(long)]
    moments: Option<usize>,
    /// Deepest squaring for l1 of powers.
    #[arg(long)]
    powers: Option<usize>,
    /// Random seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Power-iteration convergence tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Longest word length for cone test vectors.
    #[arg(long)]
    cone_length: Option<usize>,
    /// Largest ball (number of words) any method may enumerate.
    #[arg(long)]
    ball_cap: Option<usize>,
    /// Largest support any intermediate product may reach.
    #[arg(long)]
    support_cap: Option<usize>,
    /// Fail with exit code 3 instead of shrinking budgets to fit.
    #[arg(long)]
    strict: bool,
}

impl BoundArgs {
    fn apply(&self, cfg: &mut BoundConfig) {
        let set = |dst: &mut usize, v: Option<usize>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut cfg.radius, self.radius);
        set(&mut cfg.max_iterations, self.iters);
        set(&mut cfg.moment_depth, self.moments);
        set(&mut cfg.power_depth, self.powers);
        set(&mut cfg.cone_length, self.cone_length);
        set(&mut cfg.ball_cap, self.ball_cap);
        set(&mut cfg.support_cap, self.support_cap);
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.tol {
            cfg.tolerance = t;
        }
        cfg.strict |= self.strict;
    }
}

#[derive(Args)]
struct SearchArgs {
    /// Target bound, as a decimal or p/q.
    #[arg(long)]
    epsilon: Option<String>,
    /// geometric, random-words or exhaustive.
    #[arg(long)]
    strategy: Option<PoolStrategy>,
    /// Seed words for geometric pools and Dixmier averaging, comma separated.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<String>>,
    /// Most conjugators tried per certificate.
    #[arg(long)]
    max_n: Option<usize>,
    /// Word length bound for random and exhaustive pools.
    #[arg(long)]
    max_length: Option<usize>,
    /// Frank-Wolfe iterations per candidate pool.
    #[arg(long)]
    fw_iters: Option<usize>,
    /// Greedy Dixmier steps.
    #[arg(long)]
    steps: Option<usize>,
    /// Largest power 2^j of each seed in the Dixmier pool.
    #[arg(long)]
    max_power: Option<u32>,
    /// JSON search configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    bounds: BoundArgs,
}

impl SearchArgs {
    fn config(&self, report: &mut RunReport) -> Result<SearchConfig, Failure> {
        let mut cfg: SearchConfig = load_config(self.config.as_deref(), report)?;
        if let Some(e) = &self.epsilon {
            cfg.epsilon = parse_rational(e).ok_or_else(|| Failure::input(anyhow!("bad epsilon `{e}`")))?;
        }
        if let Some(s) = self.strategy {
            cfg.strategy = s;
        }
        if let Some(s) = &self.seeds {
            cfg.seeds = s.clone();
        }
        let set = |dst: &mut usize, v: Option<usize>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut cfg.max_n, self.max_n);
        set(&mut cfg.max_length, self.max_length);
        set(&mut cfg.fw_iterations, self.fw_iters);
        set(&mut cfg.dixmier_steps, self.steps);
        if let Some(p) = self.max_power {
            cfg.dixmier_max_power = p;
        }
        if let Some(s) = self.bounds.seed {
            cfg.seed = s;
        }
        self.bounds.apply(&mut cfg.bounds);
        cfg.validate().map_err(Failure::core)?;
        Ok(cfg)
    }
}

/// A failed run: exit code, cause and, when available, a report to print.
struct Failure {
    code: u8,
    error: anyhow::Error,
    report: Option<Box<RunReport>>,
}

impl Failure {
    fn input(error: anyhow::Error) -> Self {
        Failure { code: 2, error, report: None }
    }

    fn internal(error: anyhow::Error) -> Self {
        Failure { code: 4, error, report: None }
    }

    fn core(e: Error) -> Self {
        let code = if matches!(e, Error::BudgetExceeded { .. }) { 3 } else { 2 };
        Failure { code, error: e.into(), report: None }
    }
}

type Outcome = Result<(RunReport, u8), Failure>;

fn read_input(path: &Path, name: &str, report: &mut RunReport) -> Result<String, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::input)?;
    report.input(name, text.as_bytes());
    Ok(text)
}

fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>, report: &mut RunReport) -> Result<T, Failure> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = read_input(p, "config", report)?;
            serde_json::from_str(&text)
                .with_context(|| format!("parsing config {}", p.display()))
                .map_err(Failure::input)
        }
    }
}

fn parse_group(s: &str) -> Result<GroupDescriptor, Failure> {
    s.parse().map_err(Failure::core)
}

impl ElementArgs {
    fn load(&self, report: &mut RunReport) -> Result<ExactElement, Failure> {
        let group = self.group.as_deref().map(parse_group).transpose()?;
        let (text, from_file) = match (&self.element, &self.file) {
            (Some(e), _) => {
                report.input("element", e.as_bytes());
                (e.clone(), false)
            }
            (None, Some(p)) => (read_input(p, "element", report)?, true),
            (None, None) => return Err(Failure::input(anyhow!("either --element or --file is required"))),
        };
        if from_file && text.trim_start().starts_with('{') {
            let any = AnyElement::from_json_str(&text).map_err(Failure::core)?;
            if let Some(g) = &group {
                if g != any.group() {
                    return Err(Failure::input(anyhow!("--group {g} does not match the file's group {}", any.group())));
                }
            }
            return match any {
                AnyElement::Exact(a) => Ok(a),
                AnyElement::Float(a) => a.to_exact().map_err(Failure::core),
            };
        }
        let g = group.ok_or_else(|| Failure::input(anyhow!("--group is required for inline elements")))?;
        parse_element(&g, text.trim()).map_err(Failure::core)
    }
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

fn cmd_norm(element: &ElementArgs, bounds: &BoundArgs, config: Option<&Path>) -> Outcome {
    let mut report = RunReport::new("norm");
    let mut cfg: BoundConfig = load_config(config, &mut report)?;
    bounds.apply(&mut cfg);
    cfg.validate().map_err(Failure::core)?;
    let a = element.load(&mut report)?;
    report.config = serde_json::json!({ "group": a.group().to_string(), "bounds": cfg });
    match estimate(&a, &cfg) {
        Ok(e) => {
            report.status = "ok".into();
            report.result = to_value(&e);
            Ok((report, 0))
        }
        Err(Error::BudgetExceeded { what, size, cap, partial }) => {
            report.status = "budget_exceeded".into();
            report.result = serde_json::json!({
                "error": format!("{what}: size {size} exceeds budget {cap}"),
                "partial": partial,
            });
            Err(Failure { code: 3, error: anyhow!("{what}: size {size} exceeds budget {cap}"), report: Some(Box::new(report)) })
        }
        Err(e) => Err(Failure::core(e)),
    }
}

fn cmd_search(group: &str, targets: &[String], args: &SearchArgs, out: Option<&Path>) -> Outcome {
    let mut report = RunReport::new("search");
    let cfg = args.config(&mut report)?;
    let g = parse_group(group)?;
    let words = targets.iter().map(|t| g.parse_word(t.trim())).collect::<Result<Vec<_>, _>>().map_err(Failure::core)?;
    report.input("targets", targets.join(",").as_bytes());
    report.config = serde_json::json!({ "group": g.to_string(), "targets": targets, "search": cfg });
    let outcome = search_certificate(&g, &words, &cfg).map_err(Failure::core)?;
    let code = match &outcome {
        SearchOutcome::Found { certificate } => {
            if let Some(p) = out {
                write_file(p, &(certificate.to_json_string().map_err(|e| Failure::internal(e.into()))? + "\n"))?;
            }
            report.status = "found".into();
            0
        }
        SearchOutcome::NotFound { .. } => {
            report.status = "not_found".into();
            1
        }
    };
    report.result = to_value(&outcome);
    Ok((report, code))
}

fn cmd_verify(path: &Path) -> Outcome {
    let mut report = RunReport::new("verify");
    let text = read_input(path, "certificate", &mut report)?;
    let cert = Certificate::from_json_str(&text).map_err(Failure::core)?;
    report.config = serde_json::json!({ "bounds": cert.bound_config });
    let v = verify_certificate_detailed(&cert).map_err(Failure::core)?;
    report.status = if v.valid { "valid" } else { "invalid" }.into();
    let code = if v.valid { 0 } else { 1 };
    report.result = serde_json::json!({ "verification": v, "certificate": cert });
    Ok((report, code))
}

fn cmd_dixmier(element: &ElementArgs, args: &SearchArgs) -> Outcome {
    let mut report = RunReport::new("dixmier");
    let cfg = args.config(&mut report)?;
    let a = element.load(&mut report)?;
    report.config = serde_json::json!({ "group": a.group().to_string(), "search": cfg });
    let r = dixmier_average(&a, &cfg).map_err(Failure::core)?;
    report.status = if r.success { "success" } else { "failure" }.into();
    let code = if r.success { 0 } else { 1 };
    report.result = to_value(&r);
    Ok((report, code))
}

fn cmd_bench(suite: &str, cases: usize, max_ms: Option<u128>) -> Outcome {
    let mut report = RunReport::new("bench");
    let suites = bench::select(suite).map_err(Failure::input)?;
    report.config = serde_json::json!({ "suite": suite, "cases": cases, "max_ms": max_ms });
    let rows = bench::run(&suites, cases, max_ms);
    for r in &rows {
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        eprintln!("{:<16} {verdict:<4} {:>8} ms (limit {}) {}", r.suite, r.wall_time_ms, r.limit_ms, r.detail);
    }
    let pass = rows.iter().all(|r| r.pass);
    report.status = if pass { "pass" } else { "fail" }.into();
    report.result = to_value(&rows);
    Ok((report, if pass { 0 } else { 1 }))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display())).map_err(Failure::internal)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::input(anyhow!("{THREADS_VAR} must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::internal(e.into()))
}

fn run(cli: &Cli) -> Outcome {
    configure_threads()?;
    let start = Instant::now();
    let (out, outcome) = match &cli.command {
        Command::Norm { element, bounds, config, out } => (out, cmd_norm(element, bounds, config.as_deref())),
        Command::Search { group, targets, search, out } => (&None, cmd_search(group, targets, search, out.as_deref())),
        Command::Verify { certificate, out } => (out, cmd_verify(certificate)),
        Command::Dixmier { element, search, out } => (out, cmd_dixmier(element, search)),
        Command::Bench { suite, cases, max_ms, out } => (out, cmd_bench(suite, *cases, *max_ms)),
    };
    let stamp = |r: &mut RunReport| r.wall_time_ms = start.elapsed().as_millis();
    match outcome {
        Ok((mut report, code)) => {
            stamp(&mut report);
            if let Some(p) = out {
                write_file(p, &render(&report))?;
            }
            Ok((report, code))
        }
        Err(mut f) => {
            if let Some(r) = f.report.as_mut() {
                stamp(r);
            }
            Err(f)
        }
    }
}

fn render(report: &RunReport) -> String {
    serde_json::to_string_pretty(report).expect("serializable") + "\n"
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((report, code)) => {
            print!("{}", render(&report));
            ExitCode::from(code)
        }
        Err(f) => {
            if let Some(r) = &f.report {
                print!("{}", render(r));
            }
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
