//! The three dependence statistics compared by the power benchmark.
//!
//! Every statistic maps a [`Dataset`] to a scalar where larger means "more
//! dependent". All functions are pure and safe to call concurrently.

use std::fmt;
use std::str::FromStr;

use crate::error::{MeasureError, Result};
use crate::mic_grid;
use crate::scalar::Scalar;

/// Paired real samples `(x_i, y_i)` of equal length `n >= 2`, all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    x: Vec<T>,
    y: Vec<T>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(x: Vec<T>, y: Vec<T>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(MeasureError::InvalidDataset(format!(
                "x has {} values but y has {}",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(MeasureError::InvalidDataset(format!(
                "need at least 2 pairs, got {}",
                x.len()
            )));
        }
        if let Some(i) = x.iter().chain(y.iter()).position(|v| !v.is_finite()) {
            let (axis, idx) = if i < x.len() { ("x", i) } else { ("y", i - x.len()) };
            return Err(MeasureError::InvalidDataset(format!(
                "{axis}[{idx}] is not finite"
            )));
        }
        Ok(Self { x, y })
    }

    pub fn from_pairs(pairs: &[(T, T)]) -> Result<Self> {
        let (x, y) = pairs.iter().copied().unzip();
        Self::new(x, y)
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    /// Always false; a dataset holds at least two pairs.
    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// The same pairs with the roles of `x` and `y` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }

    pub fn into_parts(self) -> (Vec<T>, Vec<T>) {
        (self.x, self.y)
    }
}

/// Tuning constants for MIC.
///
/// The grid budget is `B = max(4, floor(n^grid_budget_exponent))`; grids with
/// `x_bins * y_bins <= B` are searched. At most `clump_factor * x_bins`
/// superclumps are handed to the column-partition optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicParams {
    grid_budget_exponent: f64,
    clump_factor: usize,
}

impl Default for MicParams {
    fn default() -> Self {
        Self {
            grid_budget_exponent: 0.6,
            clump_factor: 15,
        }
    }
}

impl MicParams {
    pub fn new(grid_budget_exponent: f64, clump_factor: usize) -> Result<Self> {
        if !(grid_budget_exponent > 0.0 && grid_budget_exponent < 1.0) {
            return Err(MeasureError::InvalidParameter(format!(
                "grid budget exponent must lie in (0, 1), got {grid_budget_exponent}"
            )));
        }
        if clump_factor == 0 {
            return Err(MeasureError::InvalidParameter(
                "clump factor must be at least 1".into(),
            ));
        }
        Ok(Self {
            grid_budget_exponent,
            clump_factor,
        })
    }

    pub fn grid_budget_exponent(&self) -> f64 {
        self.grid_budget_exponent
    }

    pub fn clump_factor(&self) -> usize {
        self.clump_factor
    }

    /// Grid budget `B` for a sample of size `n`, clamped so the 2x2 grid is
    /// always admissible.
    pub fn grid_budget(&self, n: usize) -> usize {
        let raw = (n as f64).powf(self.grid_budget_exponent).floor() as usize;
        raw.max(4)
    }
}

/// Identifies one of the benchmarked statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MeasureId {
    Cor,
    Dcor,
    Mic,
}

impl MeasureId {
    pub const ALL: [MeasureId; 3] = [MeasureId::Cor, MeasureId::Dcor, MeasureId::Mic];

    pub fn name(self) -> &'static str {
        match self {
            MeasureId::Cor => "cor",
            MeasureId::Dcor => "dcor",
            MeasureId::Mic => "mic",
        }
    }

    /// The one-sided test statistic used by the power engine.
    pub fn statistic<T: Scalar>(self, d: &Dataset<T>, params: &MicParams) -> Result<T> {
        match self {
            MeasureId::Cor => Ok(pearson_stat(d)),
            MeasureId::Dcor => Ok(distance_correlation(d)),
            MeasureId::Mic => mic(d, params),
        }
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureId {
    type Err = MeasureError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cor" | "pearson" => Ok(MeasureId::Cor),
            "dcor" => Ok(MeasureId::Dcor),
            "mic" => Ok(MeasureId::Mic),
            other => Err(MeasureError::InvalidParameter(format!(
                "unknown measure `{other}` (expected cor, dcor or mic)"
            ))),
        }
    }
}

fn is_constant<T: Scalar>(v: &[T]) -> bool {
    v.iter().all(|&a| a == v[0])
}

fn mean<T: Scalar>(v: &[T]) -> T {
    v.iter().copied().sum::<T>() / T::from_usize_lossy(v.len())
}

/// Pearson product-moment correlation.
///
/// Fails with [`MeasureError::DegenerateInput`] when either column is constant.
pub fn pearson<T: Scalar>(d: &Dataset<T>) -> Result<T> {
    if is_constant(d.x()) {
        return Err(MeasureError::DegenerateInput("x"));
    }
    if is_constant(d.y()) {
        return Err(MeasureError::DegenerateInput("y"));
    }
    let mx = mean(d.x());
    let my = mean(d.y());
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in d.x().iter().zip(d.y()) {
        let (da, db) = (a - mx, b - my);
        sxy = sxy + da * db;
        sxx = sxx + da * da;
        syy = syy + db * db;
    }
    let r = sxy / (sxx * syy).sqrt();
    Ok(r.max(-T::one()).min(T::one()))
}

/// Two-sided Pearson test statistic `|r|`, with 0 for constant columns.
pub fn pearson_stat<T: Scalar>(d: &Dataset<T>) -> T {
    pearson(d).map(|r| r.abs()).unwrap_or_else(|_| T::zero())
}

/// Double-centres a pairwise distance matrix in place.
fn double_center<T: Scalar>(dist: &mut [T], n: usize) {
    let nf = T::from_usize_lossy(n);
    let row_means: Vec<T> = dist
        .chunks_exact(n)
        .map(|row| row.iter().copied().sum::<T>() / nf)
        .collect();
    let grand = row_means.iter().copied().sum::<T>() / nf;
    // distance matrices are symmetric, so column means equal row means
    for (j, row) in dist.chunks_exact_mut(n).enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = *v - row_means[j] - row_means[k] + grand;
        }
    }
}

fn centered_distances<T: Scalar>(v: &[T]) -> Vec<T> {
    let n = v.len();
    let mut m = Vec::with_capacity(n * n);
    for &a in v {
        m.extend(v.iter().map(|&b| (a - b).abs()));
    }
    double_center(&mut m, n);
    m
}

/// Sample distance correlation (V-statistic form), in `[0, 1]`.
///
/// Materialises both `n x n` distance matrices. Returns 0 when either
/// variable is constant.
pub fn distance_correlation<T: Scalar>(d: &Dataset<T>) -> T {
    let n = d.len();
    let a = centered_distances(d.x());
    let b = centered_distances(d.y());
    let n2 = T::from_usize_lossy(n * n);
    let (mut ab, mut aa, mut bb) = (T::zero(), T::zero(), T::zero());
    for (&p, &q) in a.iter().zip(&b) {
        ab = ab + p * q;
        aa = aa + p * p;
        bb = bb + q * q;
    }
    let dcov2 = (ab / n2).max(T::zero());
    let dvar = ((aa / n2) * (bb / n2)).sqrt();
    if dvar <= T::zero() {
        return T::zero();
    }
    (dcov2 / dvar).sqrt().min(T::one())
}

/// Maximal Information Coefficient: the largest entry of the characteristic
/// matrix. Requires `n >= 25`.
pub fn mic<T: Scalar>(d: &Dataset<T>, params: &MicParams) -> Result<T> {
    Ok(mic_grid::characteristic_matrix(d, params)?.max())
}
