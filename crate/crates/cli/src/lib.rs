//! Command-line front end: configuration, CSV and SVG output, and the
//! `run`, `measure`, `null-cutoff` and `scenarios` subcommands.

pub mod config;
pub mod error;
pub mod format;
pub mod input;
pub mod output;
pub mod plot;

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use depower::power::{cell_stream, monotonicity_flags, null_cutoff, Phase};
use depower::{run_grid, MeasureId, MicParams, NoiseSpec, ScenarioId};

pub use config::{parse_config, RunArgs, RunPlan};
pub use error::CliError;
pub use output::{emit_csv, render_csv, RunManifest};
pub use plot::{emit_plots, render_svg};

/// Power gains between adjacent noise levels beyond this are flagged in the manifest.
pub const MONOTONICITY_SLACK: f64 = 0.07;

#[derive(Debug, Parser)]
#[command(name = "depower", version, about = "Power of cor, dcor and MIC under noisy relationships")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full power grid and write results.csv, power.svg and manifest.txt
    Run(RunArgs),
    /// Evaluate statistics on a two-column data file
    Measure(MeasureArgs),
    /// Calibrate a single null cutoff
    NullCutoff(NullCutoffArgs),
    /// Print the scenario constant table as CSV
    Scenarios,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Two columns of reals, whitespace- or comma-separated
    pub file: PathBuf,
    /// Comma-separated measures, or `all`
    #[arg(long, default_value = "all")]
    pub measures: String,
    #[arg(long)]
    pub mic_exponent: Option<f64>,
    #[arg(long)]
    pub clump_factor: Option<usize>,
}

#[derive(Debug, Args)]
pub struct NullCutoffArgs {
    #[arg(long)]
    pub measure: String,
    #[arg(long)]
    pub scenario: String,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, default_value_t = 320)]
    pub n: usize,
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn mic_params(exponent: Option<f64>, clump: Option<usize>) -> Result<MicParams, CliError> {
    let d = MicParams::default();
    MicParams::new(
        exponent.unwrap_or(d.grid_budget_exponent()),
        clump.unwrap_or(d.clump_factor()),
    )
    .map_err(|e| CliError::usage(e.to_string()))
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Runs the grid for `plan` and writes all outputs. Returns the text to
/// print; cells that failed are still listed in the manifest and turn the
/// result into a runtime error after the files are written.
pub fn execute_run(plan: &RunPlan) -> Result<String, CliError> {
    let started = unix_now();
    let report = run_grid(&plan.grid).map_err(|e| CliError::Runtime(e.to_string()))?;
    let csv = plan.out_dir.join("results.csv");
    let svg = plan.out_dir.join("power.svg");
    let manifest_path = plan.out_dir.join("manifest.txt");
    let mut outputs = Vec::new();
    if !report.results.is_empty() {
        emit_csv(&report.results, &csv)?;
        emit_plots(&report.results, &svg)?;
        outputs.extend([csv.clone(), svg.clone()]);
    }
    outputs.push(manifest_path.clone());
    let flags = monotonicity_flags(&report.results, MONOTONICITY_SLACK);
    RunManifest {
        config: &plan.grid,
        version: env!("CARGO_PKG_VERSION"),
        started_unix: started,
        finished_unix: unix_now(),
        outputs,
        failures: &report.failures,
        flags: &flags,
    }
    .write(&manifest_path)?;
    if !report.failures.is_empty() {
        return Err(CliError::Runtime(format!(
            "{} of {} cells failed; see {}",
            report.failures.len(),
            report.failures.len() + report.results.len(),
            manifest_path.display()
        )));
    }
    Ok(format!(
        "wrote {} cells to {}\n",
        report.results.len(),
        plan.out_dir.display()
    ))
}

pub fn execute_measure(args: &MeasureArgs) -> Result<String, CliError> {
    let params = mic_params(args.mic_exponent, args.clump_factor)?;
    let measures: Vec<MeasureId> = if args.measures.trim().eq_ignore_ascii_case("all") {
        MeasureId::ALL.to_vec()
    } else {
        args.measures
            .split(',')
            .map(|s| s.parse().map_err(|e: depower::MeasureError| CliError::usage(e.to_string())))
            .collect::<Result<_, _>>()?
    };
    let d = input::read_two_columns(&args.file)?;
    let mut out = String::new();
    for m in measures {
        let v = m
            .statistic(&d, &params)
            .map_err(|e| CliError::Runtime(format!("{m}: {e}")))?;
        out.push_str(&format!("{m}={}\n", format::fmt_g17(v)));
    }
    Ok(out)
}

/// Uses the stream of the first noise-grid slot of `run`'s null phase.
pub fn execute_null_cutoff(args: &NullCutoffArgs) -> Result<String, CliError> {
    let usage = |e: depower::MeasureError| CliError::usage(e.to_string());
    let measure: MeasureId = args.measure.parse().map_err(usage)?;
    let scenario: ScenarioId = args.scenario.parse().map_err(usage)?;
    let noise = NoiseSpec::new(args.sigma).map_err(usage)?;
    let mut stream = cell_stream(args.seed, scenario, 0, measure, Phase::Null);
    let cutoff = null_cutoff(
        measure,
        scenario,
        args.n,
        noise,
        args.reps,
        args.alpha,
        &MicParams::default(),
        &mut stream,
    )
    .map_err(|e| match e {
        depower::PowerError::InvalidArgument(m) => CliError::Usage(m),
        other => CliError::Runtime(other.to_string()),
    })?;
    Ok(format!("{}\n", format::fmt_g17(cutoff)))
}

/// Dispatches a parsed command line.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Run(args) => execute_run(&parse_config(args)?),
        Command::Measure(args) => execute_measure(args),
        Command::NullCutoff(args) => execute_null_cutoff(args),
        Command::Scenarios => Ok(depower::scenarios::recipe_table_csv()),
    }
}
