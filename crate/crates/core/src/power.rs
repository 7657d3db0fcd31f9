//! Null-cutoff calibration and Monte-Carlo power estimation.
//!
//! One grid cell is a `(scenario, noise level, measure)` triple. Its cutoff is
//! an order statistic of simulated null statistics and its power is the share
//! of simulated alternatives whose statistic strictly exceeds that cutoff.
//! Each cell phase draws from its own substream of the master seed, so the
//! output of [`run_grid`] does not depend on scheduling or worker count.

use std::num::NonZeroUsize;

use rayon::prelude::*;

use crate::error::{MeasureError, PowerError};
use crate::measures::{Dataset, MeasureId, MicParams};
use crate::mic_grid::MIN_MIC_SAMPLE;
use crate::rng::RandomStream;
use crate::scenarios::{generate, generate_null, NoiseSpec, ScenarioId};

/// Smallest null sample accepted by [`null_cutoff`].
pub const MIN_NULL_REPS: usize = 20;

/// Which simulation a substream feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Null,
    Alternative,
    /// Fresh nulls used to re-check the size of a calibrated cutoff.
    SizeCheck,
}

impl Phase {
    fn label(self) -> u64 {
        match self {
            Phase::Null => 0,
            Phase::Alternative => 1,
            Phase::SizeCheck => 2,
        }
    }
}

/// Stream for one phase of one grid cell.
pub fn cell_stream(
    master_seed: u64,
    scenario: ScenarioId,
    sigma_index: usize,
    measure: MeasureId,
    phase: Phase,
) -> RandomStream {
    let measure_label = MeasureId::ALL.iter().position(|&m| m == measure).unwrap_or(0) as u64;
    RandomStream::new(master_seed).substream(&[
        scenario.index(),
        sigma_index as u64,
        measure_label,
        phase.label(),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Workers {
    #[default]
    Auto,
    Fixed(NonZeroUsize),
}

/// Full description of a power experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub scenarios: Vec<ScenarioId>,
    pub noise_grid: Vec<f64>,
    pub n: usize,
    /// Alternative replicates per cell.
    pub reps: usize,
    /// Null replicates per cell; `None` uses `reps`.
    pub null_reps: Option<usize>,
    pub alpha: f64,
    pub measures: Vec<MeasureId>,
    pub master_seed: u64,
    pub mic_params: MicParams,
    pub workers: Workers,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            scenarios: ScenarioId::ALL.to_vec(),
            noise_grid: (1..=30).map(|k| k as f64 / 10.0).collect(),
            n: 320,
            reps: 500,
            null_reps: None,
            alpha: 0.05,
            measures: MeasureId::ALL.to_vec(),
            master_seed: 1,
            mic_params: MicParams::default(),
            workers: Workers::Auto,
        }
    }
}

impl GridConfig {
    pub fn null_reps(&self) -> usize {
        self.null_reps.unwrap_or(self.reps)
    }

    pub fn validate(&self) -> Result<(), PowerError> {
        let bad = |msg: String| Err(PowerError::InvalidConfig(msg));
        if self.scenarios.is_empty() {
            return bad("at least one scenario is required".into());
        }
        if self.measures.is_empty() {
            return bad("at least one measure is required".into());
        }
        if self.noise_grid.is_empty() {
            return bad("the noise grid is empty".into());
        }
        if let Some(s) = self.noise_grid.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            return bad(format!("noise levels must be finite and >= 0, got {s}"));
        }
        if self.noise_grid.windows(2).any(|w| w[1] <= w[0]) {
            return bad("noise levels must be strictly increasing".into());
        }
        if self.reps == 0 {
            return bad("reps must be at least 1".into());
        }
        if self.null_reps() < MIN_NULL_REPS {
            return bad(format!("null reps must be at least {MIN_NULL_REPS}, got {}", self.null_reps()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.measures.contains(&MeasureId::Mic) && self.n < MIN_MIC_SAMPLE {
            return bad(format!("n must be at least {MIN_MIC_SAMPLE} when mic is measured, got {}", self.n));
        }
        Ok(())
    }
}

/// One cell of the power grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerResult {
    pub scenario: ScenarioId,
    pub sigma: f64,
    pub measure: MeasureId,
    pub cutoff: f64,
    pub power: f64,
    pub rejections: usize,
    pub null_reps: usize,
    pub alt_reps: usize,
    pub n: usize,
    pub alpha: f64,
    pub master_seed: u64,
}

/// 1-based rank of the order statistic used as cutoff:
/// `ceil((1 - alpha) * (reps + 1))`, clamped to `1..=reps`.
pub fn cutoff_rank(reps: usize, alpha: f64) -> usize {
    let raw = ((1.0 - alpha) * (reps as f64 + 1.0) - 1e-9).ceil();
    (raw.max(1.0) as usize).min(reps)
}

fn statistic(measure: MeasureId, d: &Dataset<f64>, params: &MicParams) -> Result<f64, MeasureError> {
    measure.statistic(d, params)
}

/// Calibrates a rejection cutoff from `reps` simulated null datasets.
#[allow(clippy::too_many_arguments)]
pub fn null_cutoff(
    measure: MeasureId,
    scenario: ScenarioId,
    n: usize,
    noise: NoiseSpec,
    reps: usize,
    alpha: f64,
    params: &MicParams,
    stream: &mut RandomStream,
) -> Result<f64, PowerError> {
    if reps < MIN_NULL_REPS {
        return Err(PowerError::InvalidArgument(format!(
            "null reps must be at least {MIN_NULL_REPS}, got {reps}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(PowerError::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let mut stats = (0..reps)
        .map(|_| {
            let d = generate_null(scenario, n, noise, stream)?;
            statistic(measure, &d, params)
        })
        .collect::<Result<Vec<f64>, _>>()?;
    stats.sort_by(f64::total_cmp);
    Ok(stats[cutoff_rank(reps, alpha) - 1])
}

fn exceedances(
    reps: usize,
    cutoff: f64,
    mut draw: impl FnMut() -> Result<f64, MeasureError>,
) -> Result<usize, PowerError> {
    let mut hits = 0;
    for _ in 0..reps {
        if draw()? > cutoff {
            hits += 1;
        }
    }
    Ok(hits)
}

/// Share of `reps` simulated alternatives whose statistic exceeds `cutoff`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_power(
    measure: MeasureId,
    scenario: ScenarioId,
    n: usize,
    noise: NoiseSpec,
    reps: usize,
    cutoff: f64,
    params: &MicParams,
    stream: &mut RandomStream,
) -> Result<f64, PowerError> {
    if reps == 0 {
        return Err(PowerError::InvalidArgument("reps must be at least 1".into()));
    }
    let hits = exceedances(reps, cutoff, || {
        statistic(measure, &generate(scenario, n, noise, stream)?, params)
    })?;
    Ok(hits as f64 / reps as f64)
}

/// Share of `reps` fresh null datasets whose statistic exceeds `cutoff`.
#[allow(clippy::too_many_arguments)]
pub fn null_rejection_rate(
    measure: MeasureId,
    scenario: ScenarioId,
    n: usize,
    noise: NoiseSpec,
    reps: usize,
    cutoff: f64,
    params: &MicParams,
    stream: &mut RandomStream,
) -> Result<f64, PowerError> {
    if reps == 0 {
        return Err(PowerError::InvalidArgument("reps must be at least 1".into()));
    }
    let hits = exceedances(reps, cutoff, || {
        statistic(measure, &generate_null(scenario, n, noise, stream)?, params)
    })?;
    Ok(hits as f64 / reps as f64)
}

/// A grid cell that could not be computed.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskFailure {
    pub scenario: ScenarioId,
    pub sigma: f64,
    pub measure: MeasureId,
    pub error: PowerError,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GridReport {
    /// Sorted by scenario, noise level, then measure.
    pub results: Vec<PowerResult>,
    pub failures: Vec<TaskFailure>,
}

struct Task {
    scenario: ScenarioId,
    sigma_index: usize,
    sigma: f64,
    measure: MeasureId,
}

fn run_task(config: &GridConfig, task: &Task) -> Result<PowerResult, PowerError> {
    let noise = NoiseSpec::new(task.sigma)?;
    let stream = |phase| {
        cell_stream(config.master_seed, task.scenario, task.sigma_index, task.measure, phase)
    };
    let null_reps = config.null_reps();
    let cutoff = null_cutoff(
        task.measure,
        task.scenario,
        config.n,
        noise,
        null_reps,
        config.alpha,
        &config.mic_params,
        &mut stream(Phase::Null),
    )?;
    let mut alt = stream(Phase::Alternative);
    let rejections = exceedances(config.reps, cutoff, || {
        let d = generate(task.scenario, config.n, noise, &mut alt)?;
        statistic(task.measure, &d, &config.mic_params)
    })?;
    Ok(PowerResult {
        scenario: task.scenario,
        sigma: task.sigma,
        measure: task.measure,
        cutoff,
        power: rejections as f64 / config.reps as f64,
        rejections,
        null_reps,
        alt_reps: config.reps,
        n: config.n,
        alpha: config.alpha,
        master_seed: config.master_seed,
    })
}

/// Runs every `(scenario, sigma, measure)` cell of `config`.
///
/// Failed cells are reported in [`GridReport::failures`] without aborting the
/// others. Fails only on an invalid configuration or if the worker pool
/// cannot be created.
pub fn run_grid(config: &GridConfig) -> Result<GridReport, PowerError> {
    config.validate()?;
    let mut scenarios = config.scenarios.clone();
    scenarios.sort_unstable();
    scenarios.dedup();
    let mut measures = config.measures.clone();
    measures.sort_unstable();
    measures.dedup();

    let mut tasks = Vec::new();
    for &scenario in &scenarios {
        for (sigma_index, &sigma) in config.noise_grid.iter().enumerate() {
            for &measure in &measures {
                tasks.push(Task {
                    scenario,
                    sigma_index,
                    sigma,
                    measure,
                });
            }
        }
    }

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Workers::Fixed(k) = config.workers {
        builder = builder.num_threads(k.get());
    }
    let pool = builder.build().map_err(|e| PowerError::Pool(e.to_string()))?;
    let outcomes: Vec<Result<PowerResult, PowerError>> =
        pool.install(|| tasks.par_iter().map(|t| run_task(config, t)).collect());

    let mut report = GridReport::default();
    for (task, outcome) in tasks.iter().zip(outcomes) {
        match outcome {
            Ok(r) => report.results.push(r),
            Err(error) => report.failures.push(TaskFailure {
                scenario: task.scenario,
                sigma: task.sigma,
                measure: task.measure,
                error,
            }),
        }
    }
    Ok(report)
}

/// Adjacent noise levels where power rose by more than `slack`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityFlag {
    pub scenario: ScenarioId,
    pub measure: MeasureId,
    pub sigma_from: f64,
    pub sigma_to: f64,
    pub increase: f64,
}

/// Flags power increases along the noise grid beyond `slack`. Expects
/// `results` in [`run_grid`] order.
pub fn monotonicity_flags(results: &[PowerResult], slack: f64) -> Vec<MonotonicityFlag> {
    let mut flags = Vec::new();
    for (i, a) in results.iter().enumerate() {
        let next = results[i + 1..]
            .iter()
            .find(|b| b.scenario == a.scenario && b.measure == a.measure);
        if let Some(b) = next {
            if b.power - a.power > slack {
                flags.push(MonotonicityFlag {
                    scenario: a.scenario,
                    measure: a.measure,
                    sigma_from: a.sigma,
                    sigma_to: b.sigma,
                    increase: b.power - a.power,
                });
            }
        }
    }
    flags
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> GridConfig {
        GridConfig {
            scenarios: vec![ScenarioId::Linear],
            noise_grid: vec![0.5],
            n: 30,
            reps: 10,
            null_reps: Some(20),
            measures: vec![MeasureId::Cor],
            ..GridConfig::default()
        }
    }

    #[test]
    fn cutoff_rank_arithmetic() {
        assert_eq!(cutoff_rank(500, 0.05), 476);
        assert_eq!(cutoff_rank(500, 0.9999), 1);
        assert_eq!(cutoff_rank(500, 1e-6), 500);
        assert_eq!(cutoff_rank(20, 0.05), 20);
        assert_eq!(cutoff_rank(99, 0.1), 90);
    }

    #[test]
    fn default_config_matches_documented_defaults() {
        let c = GridConfig::default();
        assert_eq!(c.scenarios.len(), 8);
        assert_eq!(c.noise_grid.len(), 30);
        assert_eq!(c.noise_grid[0], 0.1);
        assert_eq!(c.noise_grid[29], 3.0);
        assert_eq!((c.n, c.reps, c.null_reps(), c.master_seed), (320, 500, 500, 1));
        assert_eq!(c.alpha, 0.05);
        assert_eq!(c.measures, MeasureId::ALL.to_vec());
        c.validate().unwrap();
    }

    #[test]
    fn config_validation() {
        let ok = small_config();
        ok.validate().unwrap();
        let cases = [
            GridConfig { alpha: 1.5, ..ok.clone() },
            GridConfig { reps: 0, ..ok.clone() },
            GridConfig { null_reps: Some(5), ..ok.clone() },
            GridConfig { noise_grid: vec![0.5, 0.5], ..ok.clone() },
            GridConfig { noise_grid: vec![-1.0], ..ok.clone() },
            GridConfig { measures: vec![], ..ok.clone() },
            GridConfig { scenarios: vec![], ..ok.clone() },
            GridConfig { measures: vec![MeasureId::Mic], n: 24, ..ok.clone() },
        ];
        for c in cases {
            assert!(matches!(c.validate(), Err(PowerError::InvalidConfig(_))), "{c:?}");
        }
    }

    #[test]
    fn null_cutoff_is_the_expected_order_statistic() {
        let noise = NoiseSpec::new(1.0).unwrap();
        let p = MicParams::default();
        let stats: Vec<f64> = {
            let mut s = RandomStream::new(4);
            let mut v: Vec<f64> = (0..500)
                .map(|_| {
                    let d = generate_null(ScenarioId::Linear, 50, noise, &mut s).unwrap();
                    MeasureId::Dcor.statistic(&d, &p).unwrap()
                })
                .collect();
            v.sort_by(f64::total_cmp);
            v
        };
        let cut = |alpha| {
            null_cutoff(MeasureId::Dcor, ScenarioId::Linear, 50, noise, 500, alpha, &p, &mut RandomStream::new(4)).unwrap()
        };
        assert_eq!(cut(0.05), stats[475]);
        assert_eq!(cut(0.9999), stats[0]);
        assert_eq!(cut(1e-9), stats[499]);
    }

    #[test]
    fn null_cutoff_argument_checks() {
        let noise = NoiseSpec::new(1.0).unwrap();
        let p = MicParams::default();
        let mut s = RandomStream::new(1);
        assert!(null_cutoff(MeasureId::Cor, ScenarioId::Linear, 30, noise, 19, 0.05, &p, &mut s).is_err());
        assert!(null_cutoff(MeasureId::Cor, ScenarioId::Linear, 30, noise, 50, 0.0, &p, &mut s).is_err());
        assert_eq!(
            null_cutoff(MeasureId::Mic, ScenarioId::Linear, 24, noise, 50, 0.05, &p, &mut s),
            Err(PowerError::Measure(MeasureError::SampleTooSmall { n: 24, min: 25 }))
        );
    }

    #[test]
    fn calibrated_cutoff_controls_size() {
        let noise = NoiseSpec::new(1.0).unwrap();
        let p = MicParams::default();
        let cutoff = null_cutoff(
            MeasureId::Cor, ScenarioId::Linear, 100, noise, 500, 0.05, &p, &mut RandomStream::new(31),
        )
        .unwrap();
        let rate = null_rejection_rate(
            MeasureId::Cor, ScenarioId::Linear, 100, noise, 500, cutoff, &p, &mut RandomStream::new(32),
        )
        .unwrap();
        assert!(rate <= 0.05 + 0.03, "{rate}");
    }

    #[test]
    fn power_edge_cases() {
        let p = MicParams::default();
        let zero = NoiseSpec::new(0.0).unwrap();
        for m in MeasureId::ALL {
            let cutoff = null_cutoff(m, ScenarioId::Linear, 100, zero, 100, 0.05, &p, &mut RandomStream::new(8)).unwrap();
            let power = estimate_power(m, ScenarioId::Linear, 100, zero, 100, cutoff, &p, &mut RandomStream::new(9)).unwrap();
            assert_eq!(power, 1.0, "{m}");
        }
        let power = estimate_power(
            MeasureId::Dcor, ScenarioId::Quadratic, 40, zero, 20, f64::INFINITY, &p, &mut RandomStream::new(1),
        )
        .unwrap();
        assert_eq!(power, 0.0);
    }

    #[test]
    fn power_near_size_when_noise_swamps_signal() {
        // signal range 1, noise sd 40: signal-to-noise well below 0.05
        let p = MicParams::default();
        let noise = NoiseSpec::new(40.0).unwrap();
        for m in [MeasureId::Cor, MeasureId::Dcor] {
            let cutoff = null_cutoff(m, ScenarioId::Linear, 100, noise, 500, 0.05, &p, &mut RandomStream::new(12)).unwrap();
            let power = estimate_power(m, ScenarioId::Linear, 100, noise, 500, cutoff, &p, &mut RandomStream::new(13)).unwrap();
            assert!((power - 0.05).abs() <= 0.08, "{m}: {power}");
        }
    }

    #[test]
    fn grid_cardinality_and_fields() {
        let report = run_grid(&small_config()).unwrap();
        assert!(report.failures.is_empty());
        assert_eq!(report.results.len(), 1);
        let r = &report.results[0];
        assert_eq!((r.alt_reps, r.null_reps, r.n), (10, 20, 30));
        assert_eq!(r.power, r.rejections as f64 / 10.0);
    }

    #[test]
    fn grid_is_sorted_and_worker_invariant() {
        let base = GridConfig {
            scenarios: vec![ScenarioId::Step, ScenarioId::Linear],
            noise_grid: vec![0.5, 1.0],
            n: 30,
            reps: 20,
            null_reps: Some(30),
            measures: vec![MeasureId::Mic, MeasureId::Cor, MeasureId::Dcor],
            ..GridConfig::default()
        };
        let one = run_grid(&GridConfig { workers: Workers::Fixed(NonZeroUsize::new(1).unwrap()), ..base.clone() }).unwrap();
        let many = run_grid(&GridConfig { workers: Workers::Fixed(NonZeroUsize::new(8).unwrap()), ..base }).unwrap();
        assert_eq!(one, many);
        assert_eq!(one.results.len(), 12);
        let keys: Vec<_> = one.results.iter().map(|r| (r.scenario, r.sigma.to_bits(), r.measure)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(one.results[0].scenario, ScenarioId::Linear);
    }

    #[test]
    fn monotonicity_flagging() {
        let mk = |sigma, power| PowerResult {
            scenario: ScenarioId::Linear,
            sigma,
            measure: MeasureId::Cor,
            cutoff: 0.0,
            power,
            rejections: 0,
            null_reps: 20,
            alt_reps: 100,
            n: 30,
            alpha: 0.05,
            master_seed: 1,
        };
        let results = vec![mk(0.1, 0.9), mk(0.2, 0.95), mk(0.3, 0.5), mk(0.4, 0.7)];
        let flags = monotonicity_flags(&results, 0.07);
        assert_eq!(flags.len(), 1);
        assert_eq!((flags[0].sigma_from, flags[0].sigma_to), (0.3, 0.4));
    }
}
