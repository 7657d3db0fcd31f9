//! Grid machinery behind MIC.
//!
//! For every row count the second variable is split into near-equal rows
//! ([`equipartition_y`]), the first variable is cut into clumps of
//! row-homogeneous runs ([`get_clumps`]), and a prefix dynamic program picks
//! the column boundaries maximising mutual information ([`optimize_x_axis`]).
//! Both axis orientations are evaluated and combined into the
//! [`CharacteristicMatrix`]. [`mic_exhaustive`] searches every grid and is
//! used to check the approximation on small samples.
//!
//! Every step only looks at the ordering of each coordinate, so MIC is
//! invariant under strictly increasing transforms of either variable.

use std::cmp::Ordering;

use crate::error::{MeasureError, Result};
use crate::measures::{Dataset, MicParams};
use crate::scalar::Scalar;

/// Smallest sample accepted by MIC.
pub const MIN_MIC_SAMPLE: usize = 25;
/// Largest sample accepted by the exhaustive grid search.
pub const MAX_EXHAUSTIVE_SAMPLE: usize = 40;

/// Counts induced by a grid, stored column-major (`counts[column][row]`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<usize>>,
    total: usize,
}

impl ContingencyTable {
    pub fn new(counts: Vec<Vec<usize>>) -> Result<Self> {
        let rows = counts.first().map_or(0, Vec::len);
        if rows == 0 || counts.iter().any(|c| c.len() != rows) {
            return Err(MeasureError::InvalidParameter(
                "contingency table must be a non-empty rectangle".into(),
            ));
        }
        let total = counts.iter().flatten().sum();
        if total == 0 {
            return Err(MeasureError::InvalidParameter(
                "contingency table has no observations".into(),
            ));
        }
        Ok(Self { counts, total })
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.total
    }
}

/// Mutual information of a contingency table, in bits.
pub fn mutual_information<T: Scalar>(t: &ContingencyTable) -> T {
    let rows = t.counts[0].len();
    let mut row_sums = vec![0usize; rows];
    for col in &t.counts {
        for (r, &c) in col.iter().enumerate() {
            row_sums[r] += c;
        }
    }
    let n = T::from_usize_lossy(t.total);
    let mut mi = T::zero();
    for col in &t.counts {
        let col_sum: usize = col.iter().sum();
        for (r, &c) in col.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c_t = T::from_usize_lossy(c);
            let expected = T::from_usize_lossy(col_sum) * T::from_usize_lossy(row_sums[r]);
            mi = mi + c_t / n * (c_t * n / expected).log2();
        }
    }
    mi.max(T::zero())
}

/// Row index of every data point, indexed like the input vector.
///
/// Rows are non-decreasing along the sorted order of the partitioned
/// variable and tied values always share a row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowAssignment {
    row_of: Vec<usize>,
    y_bins: usize,
}

impl RowAssignment {
    pub fn row_of(&self) -> &[usize] {
        &self.row_of
    }

    pub fn y_bins(&self) -> usize {
        self.y_bins
    }

    /// Number of rows that received at least one point.
    pub fn occupied_rows(&self) -> usize {
        let mut seen = vec![false; self.y_bins];
        for &r in &self.row_of {
            seen[r] = true;
        }
        seen.into_iter().filter(|&s| s).count()
    }
}

/// Stable ascending order of `v`. Values must be comparable (finite).
fn sorted_order<T: Scalar>(v: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap_or(Ordering::Equal));
    order
}

/// Splits a sorted order into runs of tied values, returned as end offsets.
fn tie_group_ends<T: Scalar>(v: &[T], order: &[usize]) -> Vec<usize> {
    let mut ends = Vec::new();
    for i in 1..order.len() {
        if v[order[i]] != v[order[i - 1]] {
            ends.push(i);
        }
    }
    ends.push(order.len());
    ends
}

/// Greedy size balancing: assigns each item (in order) to one of `bins`
/// groups so group sizes approach `remaining / remaining_bins`. Items are
/// never split. Returns the group of every item.
fn balance_groups(sizes: &[usize], bins: usize) -> Vec<usize> {
    let n: usize = sizes.iter().sum();
    let mut group_of = Vec::with_capacity(sizes.len());
    let mut group = 0usize;
    let mut in_group = 0usize;
    let mut placed = 0usize;
    let mut desired = n as f64 / bins as f64;
    for &s in sizes {
        if in_group != 0 && group + 1 < bins {
            let with = (in_group + s) as f64 - desired;
            let without = in_group as f64 - desired;
            if with.abs() >= without.abs() {
                group += 1;
                in_group = 0;
                desired = (n - placed) as f64 / (bins - group) as f64;
            }
        }
        group_of.push(group);
        in_group += s;
        placed += s;
    }
    group_of
}

/// Partitions `y` into at most `y_bins` rows of near-equal size without
/// ever separating tied values.
pub fn equipartition_y<T: Scalar>(y: &[T], y_bins: usize) -> RowAssignment {
    assert!(y_bins >= 2, "equipartition needs at least two rows");
    let order = sorted_order(y);
    let ends = tie_group_ends(y, &order);
    let sizes: Vec<usize> = ends
        .iter()
        .scan(0, |start, &end| {
            let s = end - *start;
            *start = end;
            Some(s)
        })
        .collect();
    let groups = balance_groups(&sizes, y_bins);
    let mut row_of = vec![0usize; y.len()];
    let mut start = 0;
    for (&end, &row) in ends.iter().zip(&groups) {
        for &idx in &order[start..end] {
            row_of[idx] = row;
        }
        start = end;
    }
    RowAssignment { row_of, y_bins }
}

/// Contiguous clumps of the x-sorted points together with their row counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClumpPartition {
    /// End offset (exclusive) of every clump in x-sorted order; the last is `n`.
    boundaries: Vec<usize>,
    /// `counts[clump][row]`.
    counts: Vec<Vec<usize>>,
}

impl ClumpPartition {
    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    pub fn counts(&self) -> &[Vec<usize>] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.boundaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundaries.is_empty()
    }

    pub fn rows(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }

    /// Builds a partition directly from per-clump row counts.
    pub fn from_counts(counts: Vec<Vec<usize>>) -> Result<Self> {
        let rows = counts.first().map_or(0, Vec::len);
        if rows == 0 || counts.iter().any(|c| c.len() != rows || c.iter().sum::<usize>() == 0) {
            return Err(MeasureError::InvalidParameter(
                "clump counts must be a rectangle of non-empty clumps".into(),
            ));
        }
        let boundaries = counts
            .iter()
            .scan(0, |end, c| {
                *end += c.iter().sum::<usize>();
                Some(*end)
            })
            .collect();
        Ok(Self { boundaries, counts })
    }
}

/// Groups the x-sorted points into maximal runs sharing a row, then
/// coalesces them to at most `max_clumps` superclumps.
///
/// Points with equal `x` always land in the same clump; a tie group whose
/// points span several rows forms a clump of its own.
pub fn get_clumps<T: Scalar>(x: &[T], rows: &RowAssignment, max_clumps: usize) -> ClumpPartition {
    assert!(max_clumps >= 2, "need room for at least two clumps");
    assert_eq!(x.len(), rows.row_of.len(), "row assignment length mismatch");
    let order = sorted_order(x);
    let ends = tie_group_ends(x, &order);

    // Some(row) for row-homogeneous tie groups, None for mixed ones.
    let mut clump_ends: Vec<usize> = Vec::new();
    let mut prev_label: Option<usize> = None;
    let mut start = 0;
    for &end in &ends {
        let first = rows.row_of[order[start]];
        let label = order[start..end]
            .iter()
            .all(|&i| rows.row_of[i] == first)
            .then_some(first);
        match (label, prev_label, clump_ends.last_mut()) {
            (Some(l), Some(p), Some(last)) if l == p => *last = end,
            _ => clump_ends.push(end),
        }
        prev_label = label;
        start = end;
    }

    if clump_ends.len() > max_clumps {
        let sizes: Vec<usize> = clump_ends
            .iter()
            .scan(0, |s, &e| {
                let size = e - *s;
                *s = e;
                Some(size)
            })
            .collect();
        let groups = balance_groups(&sizes, max_clumps);
        let mut merged: Vec<usize> = Vec::new();
        for (i, &end) in clump_ends.iter().enumerate() {
            if i + 1 == clump_ends.len() || groups[i + 1] != groups[i] {
                merged.push(end);
            }
        }
        clump_ends = merged;
    }

    let mut counts = vec![vec![0usize; rows.y_bins]; clump_ends.len()];
    let mut start = 0;
    for (c, &end) in clump_ends.iter().enumerate() {
        for &i in &order[start..end] {
            counts[c][rows.row_of[i]] += 1;
        }
        start = end;
    }
    ClumpPartition {
        boundaries: clump_ends,
        counts,
    }
}

/// Best mutual information (bits) achievable by merging the clumps into at
/// most `l` contiguous columns, for every `l` in `2..=max_x_bins`.
///
/// Entry `i` of the result corresponds to `l = i + 2`. The dynamic program
/// is exact with respect to the clump partition: conditional row entropy is
/// additive over columns, so the best layout of a prefix with `l` columns
/// extends a best layout of a shorter prefix with `l - 1` columns.
pub fn optimize_x_axis<T: Scalar>(c: &ClumpPartition, max_x_bins: usize) -> Vec<T> {
    assert!(max_x_bins >= 2, "need at least two columns");
    let k = c.len();
    let rows = c.rows();
    let n: usize = c.counts.iter().flatten().sum();
    if k < 2 || n == 0 {
        return vec![T::zero(); max_x_bins - 1];
    }

    // prefix[t][r]: points of row r in clumps [0, t)
    let mut prefix = vec![vec![0usize; rows]; k + 1];
    for t in 0..k {
        for r in 0..rows {
            prefix[t + 1][r] = prefix[t][r] + c.counts[t][r];
        }
    }
    let plogp = |count: usize, of: usize| -> T {
        if count == 0 {
            T::zero()
        } else {
            let ct = T::from_usize_lossy(count);
            ct * (ct / T::from_usize_lossy(of)).log2()
        }
    };
    // score[s * (k + 1) + t] = sum_r c_r log2(c_r / w) for the column of clumps [s, t)
    let mut score = vec![T::zero(); (k + 1) * (k + 1)];
    for s in 0..k {
        for t in s + 1..=k {
            let width: usize = (0..rows).map(|r| prefix[t][r] - prefix[s][r]).sum();
            score[s * (k + 1) + t] = (0..rows)
                .map(|r| plogp(prefix[t][r] - prefix[s][r], width))
                .sum();
        }
    }
    let row_term: T = (0..rows).map(|r| plogp(prefix[k][r], n)).sum();
    let nf = T::from_usize_lossy(n);

    let max_cols = max_x_bins.min(k);
    let mut best: Vec<T> = (0..=k).map(|t| score[t]).collect();
    best[0] = T::neg_infinity();
    let mut best_within = best[k];
    let mut out = Vec::with_capacity(max_x_bins - 1);
    for l in 2..=max_x_bins {
        if l <= max_cols {
            let mut next = vec![T::neg_infinity(); k + 1];
            for t in l..=k {
                let mut m = T::neg_infinity();
                for s in l - 1..t {
                    let cand = best[s] + score[s * (k + 1) + t];
                    if cand > m {
                        m = cand;
                    }
                }
                next[t] = m;
            }
            best = next;
            if best[k] > best_within {
                best_within = best[k];
            }
        }
        out.push(((best_within - row_term) / nf).max(T::zero()));
    }
    out
}

/// Normalised mutual information indexed by grid shape `(x_bins, y_bins)`
/// for every shape with `x_bins * y_bins <= B`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicMatrix<T> {
    budget: usize,
    // entries[x_bins][y_bins]
    entries: Vec<Vec<Option<T>>>,
}

impl<T: Scalar> CharacteristicMatrix<T> {
    fn new(budget: usize) -> Self {
        let side = budget / 2 + 1;
        Self {
            budget,
            entries: vec![vec![None; side]; side],
        }
    }

    fn raise(&mut self, x_bins: usize, y_bins: usize, v: T) {
        let slot = &mut self.entries[x_bins][y_bins];
        *slot = Some(match *slot {
            Some(old) if old >= v => old,
            _ => v,
        });
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn get(&self, x_bins: usize, y_bins: usize) -> Option<T> {
        self.entries.get(x_bins)?.get(y_bins).copied().flatten()
    }

    /// Defined entries as `(x_bins, y_bins, value)`, ordered by `x_bins` then `y_bins`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.entries.iter().enumerate().flat_map(|(xb, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(yb, v)| v.map(|v| (xb, yb, v)))
        })
    }

    /// The matrix of the dataset with `x` and `y` exchanged.
    pub fn transposed(&self) -> Self {
        let side = self.entries.len();
        let mut entries = vec![vec![None; side]; side];
        for (xb, row) in self.entries.iter().enumerate() {
            for (yb, v) in row.iter().enumerate() {
                entries[yb][xb] = *v;
            }
        }
        Self {
            budget: self.budget,
            entries,
        }
    }

    /// Largest entry; this is MIC.
    pub fn max(&self) -> T {
        self.iter().fold(T::zero(), |m, (_, _, v)| m.max(v))
    }
}

/// Runs the row-equipartition / column-optimisation sweep with `rows_var`
/// cut into rows and `cols_var` into columns. Calls `emit(cols, rows, value)`.
fn sweep_orientation<T: Scalar>(
    cols_var: &[T],
    rows_var: &[T],
    budget: usize,
    clump_factor: usize,
    mut emit: impl FnMut(usize, usize, T),
) {
    for rows in 2..=budget / 2 {
        let max_cols = budget / rows;
        let assignment = equipartition_y(rows_var, rows);
        let clumps = get_clumps(cols_var, &assignment, clump_factor * max_cols);
        let mi: Vec<T> = optimize_x_axis(&clumps, max_cols);
        for (i, &v) in mi.iter().enumerate() {
            let cols = i + 2;
            let norm = T::from_usize_lossy(cols.min(rows)).log2();
            emit(cols, rows, (v / norm).max(T::zero()).min(T::one()));
        }
    }
}

/// Characteristic matrix of `d`. Each entry is the larger of the two axis
/// orientations, which makes MIC symmetric in `x` and `y`.
pub fn characteristic_matrix<T: Scalar>(
    d: &Dataset<T>,
    params: &MicParams,
) -> Result<CharacteristicMatrix<T>> {
    let n = d.len();
    if n < MIN_MIC_SAMPLE {
        return Err(MeasureError::SampleTooSmall {
            n,
            min: MIN_MIC_SAMPLE,
        });
    }
    let budget = params.grid_budget(n);
    let mut m = CharacteristicMatrix::new(budget);
    sweep_orientation(d.x(), d.y(), budget, params.clump_factor(), |c, r, v| {
        m.raise(c, r, v)
    });
    sweep_orientation(d.y(), d.x(), budget, params.clump_factor(), |c, r, v| {
        m.raise(r, c, v)
    });
    Ok(m)
}

/// Dense ranks of `v` (equal values share a rank) and the number of distinct values.
fn dense_ranks<T: Scalar>(v: &[T]) -> (Vec<usize>, usize) {
    let order = sorted_order(v);
    let mut ranks = vec![0usize; v.len()];
    let mut rank = 0;
    for (pos, &i) in order.iter().enumerate() {
        if pos > 0 && v[i] != v[order[pos - 1]] {
            rank += 1;
        }
        ranks[i] = rank;
    }
    (ranks, rank + 1)
}

/// Calls `f` with every strictly increasing `k`-subset of `1..m`.
fn for_each_cut_set(m: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == 0 || k >= m {
        if k == 0 {
            f(&[]);
        }
        return;
    }
    let mut cuts: Vec<usize> = (1..=k).collect();
    loop {
        f(&cuts);
        // advance to the next combination in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if cuts[i] < m - (k - i) {
                break;
            }
            if i == 0 {
                return;
            }
        }
        cuts[i] += 1;
        for j in i + 1..k {
            cuts[j] = cuts[j - 1] + 1;
        }
    }
}

/// Exact maximum of normalised mutual information over every grid with
/// `x_bins * y_bins <= B` and every placement of cuts between distinct
/// sorted values. Exponential cost; limited to `n <= 40`.
pub fn mic_exhaustive<T: Scalar>(d: &Dataset<T>, params: &MicParams) -> Result<T> {
    let n = d.len();
    if n > MAX_EXHAUSTIVE_SAMPLE {
        return Err(MeasureError::SampleTooLarge {
            n,
            max: MAX_EXHAUSTIVE_SAMPLE,
        });
    }
    let budget = params.grid_budget(n);
    let (rx, ux) = dense_ranks(d.x());
    let (ry, uy) = dense_ranks(d.y());

    // cum[i * (uy + 1) + j] = #points with x-rank < i and y-rank < j
    let w = uy + 1;
    let mut cum = vec![0usize; (ux + 1) * w];
    for (&a, &b) in rx.iter().zip(&ry) {
        cum[(a + 1) * w + b + 1] += 1;
    }
    for i in 1..=ux {
        for j in 1..=uy {
            cum[i * w + j] += cum[(i - 1) * w + j] + cum[i * w + j - 1] - cum[(i - 1) * w + j - 1];
        }
    }
    let count = |x0: usize, x1: usize, y0: usize, y1: usize| -> usize {
        cum[x1 * w + y1] + cum[x0 * w + y0] - cum[x0 * w + y1] - cum[x1 * w + y0]
    };

    let nf = n as f64;
    let mut best = 0.0f64;
    let mut cells = Vec::new();
    for x_bins in 2..=budget / 2 {
        for y_bins in 2..=budget / x_bins {
            let norm = (x_bins.min(y_bins) as f64).log2();
            for_each_cut_set(ux, x_bins - 1, &mut |xc: &[usize]| {
                let xe: Vec<usize> = std::iter::once(0).chain(xc.iter().copied()).chain([ux]).collect();
                for_each_cut_set(uy, y_bins - 1, &mut |yc: &[usize]| {
                    let ye: Vec<usize> =
                        std::iter::once(0).chain(yc.iter().copied()).chain([uy]).collect();
                    cells.clear();
                    for a in 0..x_bins {
                        for b in 0..y_bins {
                            cells.push(count(xe[a], xe[a + 1], ye[b], ye[b + 1]));
                        }
                    }
                    let mut mi = 0.0;
                    for a in 0..x_bins {
                        let col: usize = (0..y_bins).map(|b| cells[a * y_bins + b]).sum();
                        for b in 0..y_bins {
                            let c = cells[a * y_bins + b];
                            if c == 0 {
                                continue;
                            }
                            let row: usize = (0..x_bins).map(|a2| cells[a2 * y_bins + b]).sum();
                            let p = c as f64 / nf;
                            mi += p * (c as f64 * nf / (col as f64 * row as f64)).log2();
                        }
                    }
                    let v = (mi / norm).clamp(0.0, 1.0);
                    if v > best {
                        best = v;
                    }
                });
            });
        }
    }
    Ok(T::from_f64_lossy(best))
}
