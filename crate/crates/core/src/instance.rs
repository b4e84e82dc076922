//! Metric instances, weight vectors and solutions.
//!
//! Candidate centers are exactly the points of the metric; there is no
//! separate facility set.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ordered_cost::ordered_cost;
use crate::tol;
use crate::{Error, MetricError, Result};

/// A finite metric on `n` points together with a center budget `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricInstance {
    n: usize,
    k: usize,
    dist: Vec<f64>,
}

/// Check every metric invariant and report the first violation.
///
/// `dist` is the row-major `n × n` matrix. The triangle inequality is checked
/// with slack `1e-9 · max entry`.
pub fn validate_metric(n: usize, dist: &[f64], k: usize) -> Result<(), MetricError> {
    if dist.len() != n * n {
        return Err(MetricError::DimensionMismatch { expected: n * n, found: dist.len() });
    }
    let mut max_entry = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let d = dist[i * n + j];
            if !d.is_finite() {
                return Err(MetricError::NotFinite { i, j });
            }
            if d < 0.0 {
                return Err(MetricError::Negative { i, j });
            }
            max_entry = max_entry.max(d);
        }
    }
    for i in 0..n {
        if dist[i * n + i] != 0.0 {
            return Err(MetricError::NonzeroDiagonal { i });
        }
        for j in (i + 1)..n {
            if dist[i * n + j] != dist[j * n + i] {
                return Err(MetricError::Asymmetric { i, j });
            }
        }
    }
    if k == 0 || k >= n {
        return Err(MetricError::BudgetOutOfRange { k, n });
    }
    let slack = tol::TRIANGLE_REL * max_entry;
    for i in 0..n {
        for h in 0..n {
            let dih = dist[i * n + h];
            for j in 0..n {
                if dist[i * n + j] > dih + dist[h * n + j] + slack {
                    return Err(MetricError::Triangle { i, h, j });
                }
            }
        }
    }
    Ok(())
}

impl MetricInstance {
    /// Build from a row-major `n × n` distance matrix.
    pub fn new(n: usize, dist: Vec<f64>, k: usize) -> Result<Self> {
        validate_metric(n, &dist, k)?;
        Ok(MetricInstance { n, k, dist })
    }

    pub fn from_rows(rows: &[Vec<f64>], k: usize) -> Result<Self> {
        let n = rows.len();
        let mut dist = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(MetricError::DimensionMismatch { expected: n, found: row.len() }.into());
            }
            dist.extend_from_slice(row);
        }
        Self::new(n, dist, k)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.dist
    }

    pub fn max_distance(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest strictly positive distance, if any.
    pub fn min_positive_distance(&self) -> Option<f64> {
        self.dist.iter().copied().filter(|&d| d > 0.0).reduce(f64::min)
    }

    /// Distinct positive distances, ascending.
    pub fn distinct_positive_distances(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.dist.iter().copied().filter(|&d| d > 0.0).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Same metric with another budget.
    pub fn with_budget(&self, k: usize) -> Result<Self> {
        if k == 0 || k >= self.n {
            return Err(MetricError::BudgetOutOfRange { k, n: self.n }.into());
        }
        Ok(MetricInstance { n: self.n, k, dist: self.dist.clone() })
    }

    /// The sub-metric induced by `points` (in the given order) with budget `k`.
    pub fn restrict(&self, points: &[usize], k: usize) -> Result<Self> {
        let m = points.len();
        let mut dist = Vec::with_capacity(m * m);
        for &a in points {
            if a >= self.n {
                return Err(Error::CenterOutOfRange { index: a, n: self.n });
            }
            for &b in points {
                dist.push(self.d(a, b));
            }
        }
        if k == 0 || k >= m {
            return Err(MetricError::BudgetOutOfRange { k, n: m }.into());
        }
        Ok(MetricInstance { n: m, k, dist })
    }

    /// One representative (smallest index) per class of co-located points.
    pub fn distinct_points(&self) -> Vec<usize> {
        let mut reps: Vec<usize> = Vec::new();
        for j in 0..self.n {
            if reps.iter().all(|&r| self.d(r, j) > 0.0) {
                reps.push(j);
            }
        }
        reps
    }
}

/// Euclidean distance matrix of a point set.
pub fn metric_from_points(coords: &[Vec<f64>], k: usize) -> Result<MetricInstance> {
    let n = coords.len();
    if let Some(first) = coords.first() {
        let dim = first.len();
        if let Some(bad) = coords.iter().find(|c| c.len() != dim) {
            return Err(Error::LengthMismatch { expected: dim, found: bad.len() });
        }
    }
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let sq: f64 = coords[i].iter().zip(&coords[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            let d = libm::sqrt(sq);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    MetricInstance::new(n, dist, k)
}

/// Random symmetric weights in `(0, scale]` closed under shortest paths.
pub fn gen_random_metric(n: usize, k: usize, seed: u64, scale: f64) -> Result<MetricInstance> {
    if k == 0 || k >= n {
        return Err(MetricError::BudgetOutOfRange { k, n }.into());
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter("scale must be positive and finite"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = scale - rng.gen_range(0.0..scale);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    // Floyd-Warshall closure.
    for h in 0..n {
        for i in 0..n {
            let dih = dist[i * n + h];
            for j in 0..n {
                let via = dih + dist[h * n + j];
                if via < dist[i * n + j] {
                    dist[i * n + j] = via;
                }
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist[i * n + j].min(dist[j * n + i]);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    MetricInstance::new(n, dist, k)
}

/// Points drawn uniformly from `[0, scale)^dim`, with Euclidean distances.
pub fn gen_euclidean(n: usize, k: usize, seed: u64, dim: usize, scale: f64) -> Result<MetricInstance> {
    metric_from_points(&gen_points(n, seed, dim, scale)?, k)
}

/// The coordinates used by [`gen_euclidean`].
pub fn gen_points(n: usize, seed: u64, dim: usize, scale: f64) -> Result<Vec<Vec<f64>>> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive"));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidParameter("scale must be positive and finite"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| (0..dim).map(|_| rng.gen_range(0.0..scale)).collect()).collect())
}

/// Non-increasing nonnegative weights `w_1 ≥ … ≥ w_n ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidWeights("weights must be finite"));
        }
        if w.iter().any(|&x| x < 0.0) {
            return Err(Error::InvalidWeights("weights must be nonnegative"));
        }
        if w.windows(2).any(|p| p[0] < p[1]) {
            return Err(Error::InvalidWeights("weights must be non-increasing"));
        }
        Ok(WeightVector(w))
    }

    /// `ell` ones followed by zeros.
    pub fn centrum(n: usize, ell: usize) -> Result<Self> {
        if ell == 0 || ell > n {
            return Err(Error::InvalidWeights("centrum size must be in [1, n]"));
        }
        let mut w = vec![0.0; n];
        w[..ell].fill(1.0);
        Ok(WeightVector(w))
    }

    pub fn kmedian(n: usize) -> Self {
        WeightVector(vec![1.0; n])
    }

    pub fn kcenter(n: usize) -> Self {
        let mut w = vec![0.0; n];
        if n > 0 {
            w[0] = 1.0;
        }
        WeightVector(w)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The largest weight, `0` for an empty vector.
    pub fn first(&self) -> f64 {
        self.0.first().copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }

    /// `Some(ell)` when the weights are `ell` ones followed by zeros.
    pub fn centrum_size(&self) -> Option<usize> {
        if self.0.iter().any(|&x| x != 0.0 && x != 1.0) {
            return None;
        }
        let ell = self.0.iter().filter(|&&x| x == 1.0).count();
        (ell > 0).then_some(ell)
    }
}

/// Centers plus a per-client assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Sorted, duplicate-free center indices.
    pub centers: Vec<usize>,
    pub assign: Vec<usize>,
    /// Assignment cost `d(assign[j], j)` of each client.
    pub costs: Vec<f64>,
    /// Ordered objective under the weights chosen by the caller.
    pub cost: Option<f64>,
}

impl Solution {
    /// Fill `cost` with the ordered objective under `w`.
    pub fn evaluate(mut self, w: &WeightVector) -> Result<Self> {
        self.cost = Some(ordered_cost(w, &self.costs)?);
        Ok(self)
    }

    pub fn objective(&self, w: &WeightVector) -> Result<f64> {
        ordered_cost(w, &self.costs)
    }
}

/// Assign every client to its nearest center; ties go to the smallest index.
pub fn nearest_assignment(inst: &MetricInstance, centers: &[usize]) -> Result<Solution> {
    if centers.is_empty() {
        return Err(Error::EmptyCenters);
    }
    let n = inst.n();
    let mut sorted = centers.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if let Some(&bad) = sorted.iter().find(|&&c| c >= n) {
        return Err(Error::CenterOutOfRange { index: bad, n });
    }
    let mut assign = Vec::with_capacity(n);
    let mut costs = Vec::with_capacity(n);
    for j in 0..n {
        let mut best = sorted[0];
        let mut best_d = inst.d(best, j);
        for &c in &sorted[1..] {
            let d = inst.d(c, j);
            if d < best_d {
                best = c;
                best_d = d;
            }
        }
        assign.push(best);
        costs.push(best_d);
    }
    Ok(Solution { centers: sorted, assign, costs, cost: None })
}
