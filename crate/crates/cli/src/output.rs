use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use depower::power::{MonotonicityFlag, TaskFailure};
use depower::{GridConfig, PowerResult, Workers};

use crate::error::CliError;
use crate::format::fmt_g17;

pub const CSV_HEADER: &str = "scenario,sigma,measure,n,alpha,reps,cutoff,power,seed";

/// Renders results as CSV, sorted by scenario, sigma and measure.
pub fn render_csv(results: &[PowerResult]) -> String {
    let mut rows: Vec<&PowerResult> = results.iter().collect();
    rows.sort_by(|a, b| {
        a.scenario
            .cmp(&b.scenario)
            .then(a.sigma.total_cmp(&b.sigma))
            .then(a.measure.cmp(&b.measure))
    });
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.scenario,
            fmt_g17(r.sigma),
            r.measure,
            r.n,
            fmt_g17(r.alpha),
            r.alt_reps,
            fmt_g17(r.cutoff),
            fmt_g17(r.power),
            r.master_seed
        );
    }
    out
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn emit_csv(results: &[PowerResult], path: &Path) -> Result<(), CliError> {
    if results.is_empty() {
        return Err(CliError::Runtime("no results to write".into()));
    }
    write_file(path, &render_csv(results))
}

/// Everything recorded about one `run` invocation.
#[derive(Debug, Clone)]
pub struct RunManifest<'a> {
    pub config: &'a GridConfig,
    pub version: &'static str,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub outputs: Vec<PathBuf>,
    pub failures: &'a [TaskFailure],
    pub flags: &'a [MonotonicityFlag],
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(",")
}

impl RunManifest<'_> {
    pub fn render(&self) -> String {
        let c = self.config;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        kv("tool", format!("depower {}", self.version));
        kv("started_unix", self.started_unix.to_string());
        kv("finished_unix", self.finished_unix.to_string());
        kv("scenarios", join(&c.scenarios, |s| s.to_string()));
        kv("noise", join(&c.noise_grid, |s| fmt_g17(*s)));
        kv("n", c.n.to_string());
        kv("reps", c.reps.to_string());
        kv("null-reps", c.null_reps().to_string());
        kv("alpha", fmt_g17(c.alpha));
        kv("measures", join(&c.measures, |m| m.to_string()));
        kv("seed", c.master_seed.to_string());
        kv(
            "workers",
            match c.workers {
                Workers::Auto => "auto".into(),
                Workers::Fixed(k) => k.to_string(),
            },
        );
        kv("mic-exponent", fmt_g17(c.mic_params.grid_budget_exponent()));
        kv("clump-factor", c.mic_params.clump_factor().to_string());
        kv("outputs", join(&self.outputs, |p| p.display().to_string()));
        kv("failed_cells", self.failures.len().to_string());
        for f in self.failures {
            kv(
                "failed",
                format!("{},{},{}: {}", f.scenario, fmt_g17(f.sigma), f.measure, f.error),
            );
        }
        kv("monotonicity_flags", self.flags.len().to_string());
        for f in self.flags {
            kv(
                "flag",
                format!(
                    "{},{}: power rose by {} from sigma {} to {}",
                    f.scenario,
                    f.measure,
                    fmt_g17(f.increase),
                    fmt_g17(f.sigma_from),
                    fmt_g17(f.sigma_to)
                ),
            );
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_file(path, &self.render())
    }
}
