//! Noisy relationship scenarios and their marginal-preserving nulls.
//!
//! Every scenario draws `x` (or an angle) from a fixed distribution, applies a
//! deterministic signal and adds Gaussian noise `eps = sigma * multiplier * z`.
//! All constants live in [`ScenarioId::recipe`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{MeasureError, Result};
use crate::measures::Dataset;
use crate::rng::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScenarioId {
    Linear,
    Quadratic,
    Cubic,
    SineLow,
    SineHigh,
    Root4,
    Circle,
    Step,
}

/// Human- and machine-readable description of one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recipe {
    pub name: &'static str,
    pub x: &'static str,
    pub y: &'static str,
    pub noise_multiplier: f64,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 8] = [
        ScenarioId::Linear,
        ScenarioId::Quadratic,
        ScenarioId::Cubic,
        ScenarioId::SineLow,
        ScenarioId::SineHigh,
        ScenarioId::Root4,
        ScenarioId::Circle,
        ScenarioId::Step,
    ];

    pub fn recipe(self) -> Recipe {
        let (name, x, y, noise_multiplier) = match self {
            ScenarioId::Linear => ("linear", "u", "x + eps", 1.0),
            ScenarioId::Quadratic => ("quadratic", "u", "4*(x-1/2)^2 + eps", 1.0),
            ScenarioId::Cubic => (
                "cubic",
                "u",
                "128*(x-1/3)^3 - 48*(x-1/3)^2 - 12*(x-1/3) + eps",
                10.0,
            ),
            ScenarioId::SineLow => ("sine_low", "u", "sin(4*pi*x) + eps", 2.0),
            ScenarioId::SineHigh => ("sine_high", "u", "sin(16*pi*x) + eps", 1.0),
            ScenarioId::Root4 => ("root4", "u", "x^(1/4) + eps", 1.0),
            ScenarioId::Circle => ("circle", "cos(theta) + eps_x", "sin(theta) + eps_y", 0.25),
            ScenarioId::Step => ("step", "u", "1{x > 1/2} + eps", 5.0),
        };
        Recipe {
            name,
            x,
            y,
            noise_multiplier,
        }
    }

    pub fn name(self) -> &'static str {
        self.recipe().name
    }

    pub fn noise_multiplier(self) -> f64 {
        self.recipe().noise_multiplier
    }

    /// Noise-free response for abscissa `x` (unused for the circle).
    fn signal(self, x: f64) -> f64 {
        match self {
            ScenarioId::Linear => x,
            ScenarioId::Quadratic => 4.0 * (x - 0.5).powi(2),
            ScenarioId::Cubic => {
                let t = x - 1.0 / 3.0;
                128.0 * t.powi(3) - 48.0 * t.powi(2) - 12.0 * t
            }
            ScenarioId::SineLow => (4.0 * PI * x).sin(),
            ScenarioId::SineHigh => (16.0 * PI * x).sin(),
            ScenarioId::Root4 => x.powf(0.25),
            ScenarioId::Circle => 0.0,
            ScenarioId::Step => {
                if x > 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Index used when deriving random substreams.
    pub fn index(self) -> u64 {
        Self::ALL.iter().position(|&s| s == self).unwrap_or(0) as u64
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioId {
    type Err = MeasureError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Self::ALL
            .into_iter()
            .find(|id| id.name() == key)
            .ok_or_else(|| MeasureError::InvalidParameter(format!("unknown scenario `{s}`")))
    }
}

/// Scenario constants as CSV (`name,x,y,noise_multiplier`, then one line per scenario).
pub fn recipe_table_csv() -> String {
    let mut out = String::from("name,x,y,noise_multiplier\n");
    for id in ScenarioId::ALL {
        let r = id.recipe();
        out.push_str(&format!("{},\"{}\",\"{}\",{}\n", r.name, r.x, r.y, r.noise_multiplier));
    }
    out
}

/// Standard deviation of the additive noise before the scenario multiplier.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NoiseSpec {
    sigma: f64,
}

impl NoiseSpec {
    pub fn new(sigma: f64) -> Result<Self> {
        if sigma.is_finite() && sigma >= 0.0 {
            Ok(Self { sigma })
        } else {
            Err(MeasureError::InvalidParameter(format!(
                "noise level must be finite and non-negative, got {sigma}"
            )))
        }
    }

    pub fn sigma(self) -> f64 {
        self.sigma
    }
}

/// Draws `n` i.i.d. pairs from scenario `s`.
///
/// All `x` (or angle) draws are taken from the stream before any noise draw,
/// and noise is drawn even when `sigma == 0`, so the stream is consumed
/// identically for every noise level.
pub fn generate(s: ScenarioId, n: usize, noise: NoiseSpec, stream: &mut RandomStream) -> Result<Dataset<f64>> {
    if n < 2 {
        return Err(MeasureError::InvalidDataset(format!(
            "need at least 2 pairs, got {n}"
        )));
    }
    let scale = noise.sigma * s.noise_multiplier();
    let base: Vec<f64> = (0..n).map(|_| stream.uniform()).collect();
    if s == ScenarioId::Circle {
        let theta: Vec<f64> = base.iter().map(|u| 2.0 * PI * u).collect();
        let x = theta
            .iter()
            .map(|t| t.cos() + scale * stream.standard_normal())
            .collect();
        let y = theta
            .iter()
            .map(|t| t.sin() + scale * stream.standard_normal())
            .collect();
        return Dataset::new(x, y);
    }
    let y = base
        .iter()
        .map(|&x| s.signal(x) + scale * stream.standard_normal())
        .collect();
    Dataset::new(base, y)
}

/// Independent pairs with the same marginals as [`generate`]: `x` from one
/// draw, `y` from a second, independent draw.
pub fn generate_null(s: ScenarioId, n: usize, noise: NoiseSpec, stream: &mut RandomStream) -> Result<Dataset<f64>> {
    let (x, _) = generate(s, n, noise, stream)?.into_parts();
    let (_, y) = generate(s, n, noise, stream)?.into_parts();
    Dataset::new(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma(v: f64) -> NoiseSpec {
        NoiseSpec::new(v).unwrap()
    }

    #[test]
    fn eight_distinct_scenarios() {
        let mut names: Vec<_> = ScenarioId::ALL.iter().map(|s| s.name()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), 8);
        for s in ScenarioId::ALL {
            assert_eq!(s.name().parse::<ScenarioId>().unwrap(), s);
        }
        assert_eq!("SINE-HIGH".parse::<ScenarioId>().unwrap(), ScenarioId::SineHigh);
        assert!("zigzag".parse::<ScenarioId>().is_err());
    }

    #[test]
    fn noise_validation() {
        assert!(NoiseSpec::new(-0.1).is_err());
        assert!(NoiseSpec::new(f64::NAN).is_err());
        assert!(NoiseSpec::new(0.0).is_ok());
    }

    #[test]
    fn noiseless_linear_is_identity() {
        let d = generate(ScenarioId::Linear, 5, sigma(0.0), &mut RandomStream::new(9)).unwrap();
        assert_eq!(d.x(), d.y());
    }

    #[test]
    fn same_seed_same_data() {
        for s in ScenarioId::ALL {
            let a = generate(s, 50, sigma(0.7), &mut RandomStream::new(5)).unwrap();
            let b = generate(s, 50, sigma(0.7), &mut RandomStream::new(5)).unwrap();
            assert_eq!(a, b);
            let c = generate(s, 50, sigma(0.7), &mut RandomStream::new(6)).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn noiseless_circle_on_unit_circle() {
        let d = generate(ScenarioId::Circle, 1000, sigma(0.0), &mut RandomStream::new(1)).unwrap();
        for (x, y) in d.x().iter().zip(d.y()) {
            assert!((x * x + y * y - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_signals_match_recipes() {
        let mut st = RandomStream::new(2);
        let d = generate(ScenarioId::Step, 200, sigma(0.0), &mut st).unwrap();
        for (x, y) in d.x().iter().zip(d.y()) {
            assert_eq!(*y, if *x > 0.5 { 1.0 } else { 0.0 });
        }
        let d = generate(ScenarioId::Cubic, 50, sigma(0.0), &mut st).unwrap();
        for (x, y) in d.x().iter().zip(d.y()) {
            let t = x - 1.0 / 3.0;
            assert!((y - (128.0 * t * t * t - 48.0 * t * t - 12.0 * t)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_noise_y_is_function_of_x_draws() {
        let a = generate(ScenarioId::SineHigh, 40, sigma(0.0), &mut RandomStream::new(3)).unwrap();
        let b = generate(ScenarioId::SineHigh, 40, sigma(2.0), &mut RandomStream::new(3)).unwrap();
        assert_eq!(a.x(), b.x());
    }

    #[test]
    fn null_keeps_marginals() {
        let n = 100_000;
        let s = ScenarioId::Quadratic;
        let noise = sigma(0.5);
        let alt = generate(s, n, noise, &mut RandomStream::new(21)).unwrap();
        let null = generate_null(s, n, noise, &mut RandomStream::new(22)).unwrap();
        let moments = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            let var = v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / v.len() as f64;
            (m, var)
        };
        let (ma, va) = moments(alt.y());
        let (mn, vn) = moments(null.y());
        // standard errors at n = 1e5 are about 0.002 for the mean and 0.002 for the variance
        assert!((ma - mn).abs() < 0.01, "{ma} vs {mn}");
        assert!((va - vn).abs() < 0.01, "{va} vs {vn}");
        let (mx, _) = moments(null.x());
        assert!((mx - 0.5).abs() < 0.01);
    }

    #[test]
    fn recipe_table_lists_every_scenario() {
        let csv = recipe_table_csv();
        assert_eq!(csv.lines().count(), 9);
        assert!(csv.contains("sine_high,\"u\",\"sin(16*pi*x) + eps\",1\n"));
    }
}
