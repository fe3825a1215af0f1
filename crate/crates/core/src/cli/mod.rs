//! Command-line front end.
//!
//! Every command reads a JSON configuration, writes its results under the
//! output directory and embeds the configuration hash and seed in each file.
//! Exit codes: 0 success, 1 usage or configuration error, 2 infeasible,
//! 3 solver did not converge.

mod config;

pub use config::{
    load_config, CheckSection, DesignSection, LoadedConfig, OutputSection, RunConfig, SolveSection, SweepSection,
    SCHEMA_VERSION,
};

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::designer::{DesignContext, DesignTrace, DesignerRegistry};
use crate::error::{Error, Result};
use crate::evaluator::{run_sweep, write_results_csv, ExperimentResult, FixedProfile, SchemeContext, SchemeRegistry};
use crate::feasibility::{CheckContext, CheckerRegistry, FeasibilityReport, Verdict};
use crate::netcfg::generate_channels;
use crate::profile::{evaluate_feedback, feedback_dimension, FeedbackProfile};
use crate::quantizer::{allocate_bits, quantize};
use crate::solver::{solve_full, verify_ia, IaReport, SolverOptions};

/// Command-line arguments.
#[derive(Debug, Parser)]
#[command(name = "iafb", version, about = "Interference alignment with reduced CSI feedback")]
pub struct Cli {
    /// Subcommand.
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// Configuration file (JSON, schema 1).
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Run seed; overrides the configuration.
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Worker threads for trial-parallel work (default: available parallelism).
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
    /// Output directory; overrides the configuration (default: `out`).
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Design a feedback profile; writes `design.json`.
    Design(CommonArgs),
    /// Run the feasibility checkers on the configured profile; writes `check.json`.
    Check(CommonArgs),
    /// Solve one channel draw; writes `leakage.csv` and `solve.json`.
    Solve(CommonArgs),
    /// Run a throughput sweep; writes `sweep.csv` and `sweep.json`.
    Sweep(CommonArgs),
    /// Print the feedback dimension of every scheme; writes `dims.json`.
    Dims(CommonArgs),
}

/// Process exit status of a finished command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Success.
    Ok,
    /// Usage or configuration error.
    Usage,
    /// The profile or network is infeasible.
    Infeasible,
    /// The solver did not converge.
    NotConverged,
}

impl Status {
    /// Numeric exit code.
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Usage => 1,
            Status::Infeasible => 2,
            Status::NotConverged => 3,
        }
    }
}

/// Provenance written into every output file.
#[derive(Debug, Clone, Serialize)]
struct Provenance {
    config_sha256: String,
    seed: u64,
}

struct Run {
    loaded: LoadedConfig,
    seed: u64,
    workers: Option<usize>,
    out: PathBuf,
}

impl Run {
    fn new(args: &CommonArgs) -> Result<Self> {
        let loaded = load_config(&args.config)?;
        let seed = args.seed.or(loaded.config.seed).unwrap_or(0);
        let out = args.out.clone().or_else(|| loaded.config.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
        std::fs::create_dir_all(&out)?;
        Ok(Self { loaded, seed, workers: args.workers.map(|w| w as usize), out })
    }

    fn cfg(&self) -> &RunConfig {
        &self.loaded.config
    }

    fn provenance(&self) -> Provenance {
        Provenance { config_sha256: self.loaded.sha256.clone(), seed: self.seed }
    }

    fn csv_comment(&self) -> String {
        format!("# config_sha256={} seed={}\n", self.loaded.sha256, self.seed)
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.out.join(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(&path, text)?;
        Ok(path)
    }

    fn write_csv(&self, name: &str, body: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<PathBuf> {
        let path = self.out.join(name);
        let mut buf = self.csv_comment().into_bytes();
        body(&mut buf)?;
        std::fs::write(&path, buf)?;
        Ok(path)
    }

    fn designed_profile(&self) -> Result<FeedbackProfile> {
        match &self.cfg().profile {
            Some(p) => Ok(p.clone()),
            None => {
                let registry = DesignerRegistry::default();
                let cx = DesignContext { cfg: &self.cfg().network, seed: self.seed, tol: self.cfg().rank_tol, initial: None };
                Ok(registry.get(&self.cfg().design.designer)?.design(&cx)?.profile)
            }
        }
    }
}

#[derive(Serialize)]
struct DesignOutput<'a> {
    #[serde(flatten)]
    provenance: Provenance,
    designer: &'a str,
    feedback_dimension: i64,
    profile: &'a FeedbackProfile,
    trace: Option<&'a DesignTrace>,
}

fn cmd_design(run: &Run, stdout: &mut dyn Write) -> Result<Status> {
    let cfg = run.cfg();
    let registry = DesignerRegistry::default();
    let designer = registry.get(&cfg.design.designer)?;
    let cx = DesignContext { cfg: &cfg.network, seed: run.seed, tol: cfg.rank_tol, initial: cfg.profile.as_ref() };
    let outcome = match designer.design(&cx) {
        Err(Error::Infeasible(msg)) => {
            writeln!(stdout, "infeasible: {msg}")?;
            return Ok(Status::Infeasible);
        }
        other => other?,
    };
    let path = run.write_json(
        "design.json",
        &DesignOutput {
            provenance: run.provenance(),
            designer: designer.name(),
            feedback_dimension: outcome.dimension,
            profile: &outcome.profile,
            trace: outcome.trace.as_ref(),
        },
    )?;
    writeln!(stdout, "designer {}: feedback dimension {} -> {}", designer.name(), outcome.dimension, path.display())?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct CheckEntry {
    checker: String,
    verdict: String,
    report: Option<FeasibilityReport>,
    error: Option<String>,
}

#[derive(Serialize)]
struct CheckOutput<'a> {
    #[serde(flatten)]
    provenance: Provenance,
    profile: &'a FeedbackProfile,
    feedback_dimension: i64,
    checks: Vec<CheckEntry>,
    agree: bool,
    verdict: Verdict,
}

fn error_label(e: &Error) -> &'static str {
    match e {
        Error::UnsupportedCase(_) => "unsupported-case",
        Error::UnsupportedSize(_) => "unsupported-size",
        _ => "error",
    }
}

fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Feasible => "feasible",
        Verdict::Infeasible => "infeasible",
        Verdict::Unknown => "unknown",
    }
}

fn cmd_check(run: &Run, stdout: &mut dyn Write) -> Result<Status> {
    let cfg = run.cfg();
    let profile = cfg.profile.clone().unwrap_or_else(|| FeedbackProfile::truncated_full(&cfg.network));
    let registry = CheckerRegistry::default();
    let names: Vec<String> = match &cfg.check.checkers {
        Some(list) => list.clone(),
        None => registry.names().into_iter().map(String::from).collect(),
    };
    let h = generate_channels(&cfg.network, run.seed);
    let cx = CheckContext { cfg: &cfg.network, profile: &profile, channels: &h, tol: cfg.rank_tol, p_range: cfg.check.p_range };
    let mut checks = Vec::new();
    for name in &names {
        let checker = registry.get(name)?;
        let entry = match checker.check(&cx) {
            Ok(r) => CheckEntry { checker: name.clone(), verdict: verdict_label(r.verdict).into(), report: Some(r), error: None },
            Err(e) => CheckEntry { checker: name.clone(), verdict: error_label(&e).into(), report: None, error: Some(e.to_string()) },
        };
        checks.push(entry);
    }
    let decisive: Vec<Verdict> =
        checks.iter().filter_map(|c| c.report.as_ref()).map(|r| r.verdict).filter(|&v| v != Verdict::Unknown).collect();
    let agree = decisive.windows(2).all(|w| w[0] == w[1]);
    let verdict = if decisive.contains(&Verdict::Infeasible) {
        Verdict::Infeasible
    } else if decisive.contains(&Verdict::Feasible) {
        Verdict::Feasible
    } else {
        Verdict::Unknown
    };
    for c in &checks {
        writeln!(stdout, "{:<14}{}", c.checker, c.verdict)?;
    }
    let path = run.write_json(
        "check.json",
        &CheckOutput {
            provenance: run.provenance(),
            feedback_dimension: feedback_dimension(&cfg.network, &profile)?,
            profile: &profile,
            checks,
            agree,
            verdict,
        },
    )?;
    writeln!(stdout, "verdict {} (agree: {agree}) -> {}", verdict_label(verdict), path.display())?;
    Ok(if verdict == Verdict::Infeasible { Status::Infeasible } else { Status::Ok })
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    #[serde(flatten)]
    provenance: Provenance,
    profile: &'a FeedbackProfile,
    feedback_dimension: usize,
    total_bits: Option<u32>,
    bits: Option<Vec<u32>>,
    distortion: Option<Vec<f64>>,
    sweeps: usize,
    attempt: usize,
    converged: bool,
    monotone: bool,
    final_leakage: f64,
    verify: IaReport,
    snr_db: Option<f64>,
    sum_rate: Option<f64>,
}

fn cmd_solve(run: &Run, stdout: &mut dyn Write) -> Result<Status> {
    let cfg = run.cfg();
    let net = &cfg.network;
    let profile = match run.designed_profile() {
        Err(Error::Infeasible(msg)) => {
            writeln!(stdout, "infeasible: {msg}")?;
            return Ok(Status::Infeasible);
        }
        other => other?,
    };
    let h = generate_channels(net, run.seed);
    let fed = evaluate_feedback(net, &profile, &h, None)?;
    let (fed, bits, distortion) = match cfg.solve.total_bits {
        None => (fed, None, None),
        Some(total) => {
            let q = quantize(&fed, &allocate_bits(&fed.subspace_dims(), total)?, run.seed, &cfg.solve.quantizer)?;
            (q.fed, Some(q.bits), Some(q.distortion))
        }
    };
    let opts = SolverOptions { seed: run.seed, ..cfg.solve.solver };
    let sol = solve_full(net, &profile, &h, &fed, &opts)?;
    let verify = verify_ia(net, &h, &sol.v, &sol.u, cfg.solve.verify_tol)?;
    let sum_rate = cfg.solve.snr_db.map(|s| crate::evaluator::sum_rate(net, &h, &sol.v, &sol.u, s)).transpose()?;
    let trace = run.write_csv("leakage.csv", |buf| sol.write_trace_csv(buf))?;
    let path = run.write_json(
        "solve.json",
        &SolveOutput {
            provenance: run.provenance(),
            profile: &profile,
            feedback_dimension: fed.total_dimension(),
            total_bits: cfg.solve.total_bits,
            bits,
            distortion,
            sweeps: sol.leakage_trace.len() - 1,
            attempt: sol.attempt,
            converged: sol.converged,
            monotone: sol.monotone,
            final_leakage: sol.final_leakage(),
            verify,
            snr_db: cfg.solve.snr_db,
            sum_rate,
        },
    )?;
    writeln!(
        stdout,
        "leakage {:.3e} after {} sweeps (converged: {}); residual {:.3e}, verify {} -> {}, {}",
        sol.final_leakage(),
        sol.leakage_trace.len() - 1,
        sol.converged,
        verify.max_cross_residual,
        if verify.pass { "pass" } else { "fail" },
        trace.display(),
        path.display()
    )?;
    Ok(if sol.converged { Status::Ok } else { Status::NotConverged })
}

fn scheme_registry(cfg: &RunConfig) -> SchemeRegistry {
    let mut registry = SchemeRegistry::default();
    if let Some(p) = &cfg.profile {
        registry.register(Box::new(FixedProfile(p.clone())));
    }
    registry
}

#[derive(Serialize)]
struct SweepOutput<'a> {
    #[serde(flatten)]
    provenance: Provenance,
    results: &'a [ExperimentResult],
}

fn cmd_sweep(run: &Run, stdout: &mut dyn Write) -> Result<Status> {
    let cfg = run.cfg();
    let section = cfg.sweep.as_ref().ok_or_else(|| Error::Config("the sweep command needs a 'sweep' section".into()))?;
    let registry = scheme_registry(cfg);
    let cx = SchemeContext { cfg: &cfg.network, seed: run.seed, tol: cfg.rank_tol };
    let schemes = match registry.prepare(&section.schemes, &cx) {
        Err(Error::Infeasible(msg)) => {
            writeln!(stdout, "infeasible: {msg}")?;
            return Ok(Status::Infeasible);
        }
        other => other?,
    };
    let results = run_sweep(&cfg.network, &schemes, &section.spec(), run.seed, run.workers)?;
    let csv = run.write_csv("sweep.csv", |buf| write_results_csv(&results, buf))?;
    let json = run.write_json("sweep.json", &SweepOutput { provenance: run.provenance(), results: &results })?;
    for r in &results {
        for p in &r.points {
            writeln!(
                stdout,
                "{:<10} D={:<4} {:>8} {:>9.3} +/- {:.3} ({} trials, {} failed)",
                r.scheme, r.feedback_dimension, p.value, p.mean_tput, p.ci95, p.trials, p.failures
            )?;
        }
    }
    writeln!(stdout, "-> {}, {}", csv.display(), json.display())?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct DimsEntry {
    scheme: String,
    feedback_dimension: Option<usize>,
    error: Option<String>,
}

#[derive(Serialize)]
struct DimsOutput {
    #[serde(flatten)]
    provenance: Provenance,
    full_direction_dimension: usize,
    schemes: Vec<DimsEntry>,
}

fn cmd_dims(run: &Run, stdout: &mut dyn Write) -> Result<Status> {
    let cfg = run.cfg();
    let registry = scheme_registry(cfg);
    let cx = SchemeContext { cfg: &cfg.network, seed: run.seed, tol: cfg.rank_tol };
    let mut schemes = Vec::new();
    for name in registry.names() {
        let entry = match registry.get(name)?.prepare(&cx) {
            Ok(s) => DimsEntry { scheme: name.to_string(), feedback_dimension: Some(s.feedback_dimension), error: None },
            Err(e) => DimsEntry { scheme: name.to_string(), feedback_dimension: None, error: Some(e.to_string()) },
        };
        match entry.feedback_dimension {
            Some(d) => writeln!(stdout, "{:<10} {d}", entry.scheme)?,
            None => writeln!(stdout, "{:<10} n/a ({})", entry.scheme, entry.error.as_deref().unwrap_or_default())?,
        }
        schemes.push(entry);
    }
    let output = DimsOutput {
        provenance: run.provenance(),
        full_direction_dimension: crate::profile::full_direction_dimension(&cfg.network),
        schemes,
    };
    let path = run.write_json("dims.json", &output)?;
    writeln!(stdout, "-> {}", path.display())?;
    Ok(Status::Ok)
}

/// Runs a parsed command, writing progress lines to `stdout`.
pub fn execute(command: &Command, stdout: &mut dyn Write) -> Result<Status> {
    let (args, f): (&CommonArgs, fn(&Run, &mut dyn Write) -> Result<Status>) = match command {
        Command::Design(a) => (a, cmd_design),
        Command::Check(a) => (a, cmd_check),
        Command::Solve(a) => (a, cmd_solve),
        Command::Sweep(a) => (a, cmd_sweep),
        Command::Dims(a) => (a, cmd_dims),
    };
    f(&Run::new(args)?, stdout)
}

/// Parses `args` (including the program name), runs the command and maps
/// the outcome to an exit code. Errors are reported on stderr.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Status::Usage.code() } else { Status::Ok.code() });
        }
    };
    let mut stdout = std::io::stdout().lock();
    match execute(&cli.command, &mut stdout) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(Status::Usage.code())
        }
    }
}
