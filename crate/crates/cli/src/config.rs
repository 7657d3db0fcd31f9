//! Resolution of the run configuration from defaults, a key=value file and flags.
//!
//! Keys accepted in the config file match the long flag names of `run`
//! without the leading dashes. Later sources win: flags override the file,
//! which overrides the built-in defaults.

use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use clap::Args;
use depower::{GridConfig, MeasureId, MicParams, ScenarioId, Workers};

use crate::error::CliError;

pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct RunArgs {
    /// Comma-separated scenarios, or `all`
    #[arg(long)]
    pub scenarios: Option<String>,
    /// Noise levels: comma list (`0.5,1,2`) or `start:step:count`
    #[arg(long)]
    pub noise: Option<String>,
    /// Sample size per simulated dataset
    #[arg(long)]
    pub n: Option<String>,
    /// Alternative replicates per cell
    #[arg(long)]
    pub reps: Option<String>,
    /// Null replicates per cell (defaults to --reps)
    #[arg(long)]
    pub null_reps: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
    /// Comma-separated measures (cor, dcor, mic), or `all`
    #[arg(long)]
    pub measures: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Worker threads, or `auto`
    #[arg(long)]
    pub workers: Option<String>,
    /// MIC grid budget exponent
    #[arg(long)]
    pub mic_exponent: Option<String>,
    /// MIC clump factor
    #[arg(long)]
    pub clump_factor: Option<String>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Flat key=value configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// A fully resolved `run` invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunPlan {
    pub grid: GridConfig,
    pub out_dir: PathBuf,
}

impl Default for RunPlan {
    fn default() -> Self {
        Self {
            grid: GridConfig::default(),
            out_dir: PathBuf::from(DEFAULT_OUT_DIR),
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::usage(format!("--{key}: malformed number `{value}`")))
}

/// Parses `0.5,1.0` or `start:step:count`.
pub fn parse_noise(value: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = value.split(':').collect();
    match parts.as_slice() {
        [start, step, count] => {
            let start: f64 = parse_num("noise", start)?;
            let step: f64 = parse_num("noise", step)?;
            let count: usize = parse_num("noise", count)?;
            Ok((0..count).map(|i| start + step * i as f64).collect())
        }
        [list] => list.split(',').map(|s| parse_num("noise", s)).collect(),
        _ => Err(CliError::usage(format!(
            "--noise: expected a comma list or start:step:count, got `{value}`"
        ))),
    }
}

fn parse_list<T>(key: &str, value: &str, all: &[T]) -> Result<Vec<T>, CliError>
where
    T: std::str::FromStr + Copy,
    T::Err: std::fmt::Display,
{
    if value.trim().eq_ignore_ascii_case("all") {
        return Ok(all.to_vec());
    }
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<T>().map_err(|e| CliError::usage(format!("--{key}: {e}"))))
        .collect()
}

fn parse_workers(value: &str) -> Result<Workers, CliError> {
    if value.trim().eq_ignore_ascii_case("auto") {
        return Ok(Workers::Auto);
    }
    let k: usize = parse_num("workers", value)?;
    NonZeroUsize::new(k)
        .map(Workers::Fixed)
        .ok_or_else(|| CliError::usage("--workers: must be positive or `auto`"))
}

/// Applies a single setting to `plan`.
pub fn apply(plan: &mut RunPlan, key: &str, value: &str) -> Result<(), CliError> {
    let g = &mut plan.grid;
    match key {
        "scenarios" => g.scenarios = parse_list(key, value, &ScenarioId::ALL)?,
        "noise" => g.noise_grid = parse_noise(value)?,
        "n" => g.n = parse_num(key, value)?,
        "reps" => g.reps = parse_num(key, value)?,
        "null-reps" => g.null_reps = Some(parse_num(key, value)?),
        "alpha" => g.alpha = parse_num(key, value)?,
        "measures" => g.measures = parse_list(key, value, &MeasureId::ALL)?,
        "seed" => g.master_seed = parse_num(key, value)?,
        "workers" => g.workers = parse_workers(value)?,
        "mic-exponent" => {
            let e: f64 = parse_num(key, value)?;
            g.mic_params = MicParams::new(e, g.mic_params.clump_factor())
                .map_err(|e| CliError::usage(format!("--{key}: {e}")))?;
        }
        "clump-factor" => {
            let c: usize = parse_num(key, value)?;
            g.mic_params = MicParams::new(g.mic_params.grid_budget_exponent(), c)
                .map_err(|e| CliError::usage(format!("--{key}: {e}")))?;
        }
        "out-dir" => plan.out_dir = PathBuf::from(value.trim()),
        other => return Err(CliError::usage(format!("unknown setting `{other}`"))),
    }
    Ok(())
}

/// Reads `key=value` lines; blank lines and `#` comments are skipped.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config_text(&text)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
        out.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(out)
}

fn flag_settings(args: &RunArgs) -> Vec<(&'static str, String)> {
    let pairs = [
        ("scenarios", &args.scenarios),
        ("noise", &args.noise),
        ("n", &args.n),
        ("reps", &args.reps),
        ("null-reps", &args.null_reps),
        ("alpha", &args.alpha),
        ("measures", &args.measures),
        ("seed", &args.seed),
        ("workers", &args.workers),
        ("mic-exponent", &args.mic_exponent),
        ("clump-factor", &args.clump_factor),
    ];
    let mut out: Vec<(&'static str, String)> = pairs
        .into_iter()
        .filter_map(|(k, v)| v.clone().map(|v| (k, v)))
        .collect();
    if let Some(dir) = &args.out_dir {
        out.push(("out-dir", dir.display().to_string()));
    }
    out
}

/// Resolves defaults, then the config file (if any), then flags, and
/// validates the result.
pub fn parse_config(args: &RunArgs) -> Result<RunPlan, CliError> {
    let mut plan = RunPlan::default();
    if let Some(path) = &args.config {
        for (k, v) in read_config_file(path)? {
            apply(&mut plan, &k, &v)?;
        }
    }
    for (k, v) in flag_settings(args) {
        apply(&mut plan, k, &v)?;
    }
    plan.grid
        .validate()
        .map_err(|e| CliError::usage(e.to_string()))?;
    Ok(plan)
}
