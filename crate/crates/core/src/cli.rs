// SPDX-License-Identifier: MIT OR Apache-2.0

//! Command-line front end. Every run writes a JSON report holding the fully
//! resolved configuration (including the effective seed), the result, and a
//! separate `timings` field; rerunning the embedded configuration reproduces
//! every number except the timings.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bootstrap::{test_multi, test_single, StatKind, DEFAULT_REPLICATES};
use crate::data::DataMatrix;
use crate::diagnostics::{panel_heteroscedasticity_screen, VarianceTestConfig, DEFAULT_HC_DRAWS};
use crate::error::{Error, Result};
use crate::io::load_csv;
use crate::simulate::{
    run_power_curve, run_rejection_experiment, run_wbs_experiment, RateRow, Scenario, ScenarioKind,
};
use crate::wbs::{wbs_estimate, WbsConfig};

#[derive(Debug, Parser)]
#[command(name = "hetcp", version, about = "Mean change-point inference for heteroscedastic high-dimensional panels")]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "HETCP_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bootstrap test of no change against one change point.
    TestSingle(TestArgs),
    /// Bootstrap test of no change against several change points.
    TestMulti(TestArgs),
    /// Locate change points by wild binary segmentation.
    Estimate(EstimateArgs),
    /// Run a named Monte Carlo scenario and emit a CSV table.
    Simulate(SimulateArgs),
    /// Screen every coordinate for non-constant variance.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TestArgs {
    /// Panel CSV: rows are time points, columns are coordinates.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    pub bootstrap_reps: usize,
    /// Master seed; a random one is drawn and recorded when absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON report path (default: stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimateArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Number of random intervals.
    #[arg(long, default_value_t = 1000)]
    pub intervals: usize,
    /// Bootstrap replicates for the threshold.
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    pub wbs_reps: usize,
    /// Quantile level of the bootstrap threshold.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    /// Scenario id such as `table1-a2-ar05-n400-p100`.
    #[arg(long)]
    pub scenario: String,
    /// Monte Carlo replications.
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1")]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    pub bootstrap_reps: usize,
    #[arg(long, default_value_t = 1000)]
    pub intervals: usize,
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    pub wbs_reps: usize,
    /// Shift multipliers for power curves.
    #[arg(long, value_delimiter = ',', default_value = "0,0.05,0.1,0.15,0.2,0.3")]
    pub deltas: Vec<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV table path (default: stdout).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// JSON manifest path with the scenario, seeds and summary.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DiagnoseArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Block-length exponent.
    #[arg(long, default_value_t = 0.7)]
    pub s: f64,
    /// Long-run block exponent.
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
    #[arg(long, default_value_t = DEFAULT_HC_DRAWS)]
    pub hc_draws: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn resolve_seed(seed: &mut Option<u64>) -> u64 {
    *seed.get_or_insert_with(rand::random)
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_json(path: Option<&Path>, value: &Value) -> Result<()> {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn report(command: &str, config: &impl Serialize, threads: usize, result: Value, started: Instant) -> Result<Value> {
    Ok(json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config": serde_json::to_value(config)?,
        "threads": threads,
        "result": result,
        "timings": { "elapsed_seconds": started.elapsed().as_secs_f64() },
    }))
}

#[derive(Serialize)]
struct WbsRow<'a> {
    scenario: &'a str,
    count_error: i64,
    frequency: usize,
    reps: usize,
    mse: f64,
    mean_ari: f64,
}

#[derive(Serialize)]
struct PowerRow<'a> {
    scenario: &'a str,
    alpha: f64,
    delta: f64,
    rate: f64,
    se: f64,
    reps: usize,
}

fn simulate(mut args: SimulateArgs, threads: usize, started: Instant) -> Result<()> {
    let seed = resolve_seed(&mut args.seed);
    let scenario = Scenario::parse(&args.scenario)?;
    let id = scenario.id.as_str();
    let mut out = csv::Writer::from_writer(sink(args.output.as_deref())?);
    let summary = match scenario.kind {
        ScenarioKind::Single | ScenarioKind::Multi => {
            let kind = if scenario.kind == ScenarioKind::Single {
                StatKind::Single
            } else {
                StatKind::Multi
            };
            let run = run_rejection_experiment(id, &scenario.spec, kind, &args.alpha, args.reps, args.bootstrap_reps, seed)?;
            for row in &run.rows {
                out.serialize(row)?;
            }
            serde_json::to_value::<&[RateRow]>(&run.rows)?
        }
        ScenarioKind::Power => {
            let alpha = *args.alpha.first().ok_or_else(|| Error::invalid("need an alpha"))?;
            let curve = run_power_curve(&scenario.spec, &args.deltas, alpha, args.reps, args.bootstrap_reps, seed)?;
            for pt in &curve {
                out.serialize(PowerRow {
                    scenario: id,
                    alpha,
                    delta: pt.delta,
                    rate: pt.rate,
                    se: pt.se,
                    reps: pt.reps,
                })?;
            }
            serde_json::to_value(&curve)?
        }
        ScenarioKind::Wbs => {
            let cfg = WbsConfig {
                intervals: args.intervals,
                replicates: args.wbs_reps,
                ..WbsConfig::default()
            };
            let res = run_wbs_experiment(&scenario.spec, &cfg, args.reps, seed)?;
            for (&count_error, &frequency) in &res.histogram {
                out.serialize(WbsRow {
                    scenario: id,
                    count_error,
                    frequency,
                    reps: args.reps,
                    mse: res.mse,
                    mean_ari: res.mean_ari,
                })?;
            }
            json!({ "histogram": res.histogram, "mse": res.mse, "mean_ari": res.mean_ari })
        }
    };
    out.flush()?;
    if let Some(path) = args.manifest.clone() {
        let manifest = report(
            "simulate",
            &args,
            threads,
            json!({ "scenario": scenario, "summary": summary }),
            started,
        )?;
        write_json(Some(&path), &manifest)?;
    }
    Ok(())
}

/// Executes one parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    let started = Instant::now();
    let threads = cli.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        return Err(Error::invalid("--threads must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::TestSingle(mut a) => {
            let seed = resolve_seed(&mut a.seed);
            let x = load_csv(&a.input)?;
            let r = test_single(&x, a.alpha, a.bootstrap_reps, seed)?;
            write_json(a.output.as_deref(), &report("test-single", &a, threads, shape(&x, r)?, started)?)
        }
        Command::TestMulti(mut a) => {
            let seed = resolve_seed(&mut a.seed);
            let x = load_csv(&a.input)?;
            let r = test_multi(&x, a.alpha, a.bootstrap_reps, seed)?;
            write_json(a.output.as_deref(), &report("test-multi", &a, threads, shape(&x, r)?, started)?)
        }
        Command::Estimate(mut a) => {
            let seed = resolve_seed(&mut a.seed);
            let x = load_csv(&a.input)?;
            let cfg = WbsConfig {
                intervals: a.intervals,
                replicates: a.wbs_reps,
                quantile_level: a.level,
                seed,
            };
            let r = wbs_estimate(&x, &cfg)?;
            write_json(a.output.as_deref(), &report("estimate", &a, threads, shape(&x, r)?, started)?)
        }
        Command::Diagnose(mut a) => {
            let seed = resolve_seed(&mut a.seed);
            let x = load_csv(&a.input)?;
            let cfg = VarianceTestConfig { s: a.s, q: a.q };
            let r = panel_heteroscedasticity_screen(&x, &cfg, a.hc_draws, seed)?;
            write_json(a.output.as_deref(), &report("diagnose", &a, threads, shape(&x, r)?, started)?)
        }
        Command::Simulate(a) => simulate(a, threads, started),
    })
}

fn shape(x: &DataMatrix, result: impl Serialize) -> Result<Value> {
    Ok(json!({ "n": x.n(), "p": x.p(), "report": serde_json::to_value(result)? }))
}

/// Parses `args`, runs, prints any error to stderr and returns the exit
/// code: 0 on success, 2 for usage errors, 3 for data errors, 4 for
/// numerically degenerate input.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
