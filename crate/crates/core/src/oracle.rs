//! Exhaustive solvers used as ground truth.
//!
//! Center sets are enumerated as lexicographic `k`-subsets with incremental
//! nearest-distance updates; the first minimum found is kept.

use alloc::vec;
use alloc::vec::Vec;

use crate::instance::{nearest_assignment, MetricInstance, Solution, WeightVector};
use crate::ordered_cost::{binomial, ordered_cost, sort_desc, ProxySpec};
use crate::{Error, Result};

/// Default limit on the number of enumerated center sets.
pub const DEFAULT_CAP: u128 = 1_000_000;

/// Minimize `eval(per-client best cost)` over all `k`-subsets, where the
/// per-client cost is the smallest entry of `cost[i·n + j]` over chosen `i`.
fn search_subsets(
    n: usize,
    k: usize,
    cost: &[f64],
    cap: u128,
    mut eval: impl FnMut(&[f64]) -> f64,
) -> Result<(Vec<usize>, f64)> {
    let subsets = binomial(n as u64, k as u64);
    if subsets > cap {
        return Err(Error::OracleCap { subsets, cap });
    }
    // best[d] holds the per-client minimum after choosing d centers
    let mut best = vec![vec![f64::INFINITY; n]; k + 1];
    let mut chosen = vec![0usize; k];
    let mut winner: Option<(Vec<usize>, f64)> = None;

    fn rec(
        depth: usize,
        start: usize,
        n: usize,
        k: usize,
        cost: &[f64],
        best: &mut [Vec<f64>],
        chosen: &mut [usize],
        winner: &mut Option<(Vec<usize>, f64)>,
        eval: &mut dyn FnMut(&[f64]) -> f64,
    ) {
        if depth == k {
            let v = eval(&best[k]);
            if winner.as_ref().map_or(true, |w| v < w.1) {
                *winner = Some((chosen.to_vec(), v));
            }
            return;
        }
        for i in start..=(n - (k - depth)) {
            chosen[depth] = i;
            let (lo, hi) = best.split_at_mut(depth + 1);
            let row = &cost[i * n..(i + 1) * n];
            for ((next, &prev), &c) in hi[0].iter_mut().zip(&lo[depth]).zip(row) {
                *next = prev.min(c);
            }
            rec(depth + 1, i + 1, n, k, cost, best, chosen, winner, eval);
        }
    }

    rec(0, 0, n, k, cost, &mut best, &mut chosen, &mut winner, &mut eval);
    Ok(winner.expect("k < n gives at least one subset"))
}

/// Exact ordered optimum and its sorted assignment-cost vector.
pub fn brute_force_ordered(inst: &MetricInstance, w: &WeightVector, cap: u128) -> Result<(Solution, Vec<f64>)> {
    if w.len() != inst.n() {
        return Err(Error::LengthMismatch { expected: inst.n(), found: w.len() });
    }
    let weights = w.as_slice();
    let mut scratch = vec![0.0; inst.n()];
    let (centers, _) = search_subsets(inst.n(), inst.k(), inst.matrix(), cap, |c| {
        scratch.copy_from_slice(c);
        scratch.sort_by(|a, b| b.total_cmp(a));
        weights.iter().zip(&scratch).map(|(a, b)| a * b).sum()
    })?;
    let sol = nearest_assignment(inst, &centers)?.evaluate(w)?;
    let sorted = sort_desc(&sol.costs);
    Ok((sol, sorted))
}

/// Exact minimum of `Σ_j demand_j · proxy(c_{i(j)j})` over `k`-subsets.
pub fn brute_force_proxy_sum(
    inst: &MetricInstance,
    proxy: &ProxySpec,
    demands: &[u64],
    cap: u128,
) -> Result<(Solution, f64)> {
    if demands.len() != inst.n() {
        return Err(Error::LengthMismatch { expected: inst.n(), found: demands.len() });
    }
    let p = proxy.matrix(inst);
    let (centers, value) = search_subsets(inst.n(), inst.k(), &p, cap, |c| {
        c.iter().zip(demands).map(|(v, &d)| v * d as f64).sum()
    })?;
    Ok((nearest_assignment(inst, &centers)?, value))
}

/// Largest `Σ_i w_i c_{π(i)}` over all permutations `π` (`n ≤ 8`).
pub fn permutation_cost_max(w: &WeightVector, c: &[f64]) -> Result<f64> {
    let n = c.len();
    if w.len() != n {
        return Err(Error::LengthMismatch { expected: w.len(), found: n });
    }
    if n > 8 {
        return Err(Error::InvalidParameter("permutation oracle needs n <= 8"));
    }
    let w = w.as_slice();
    let mut perm: Vec<usize> = (0..n).collect();
    let value = |p: &[usize]| -> f64 { p.iter().zip(w).map(|(&i, wi)| wi * c[i]).sum() };
    let mut best = value(&perm);
    // Heap's algorithm, iterative form
    let mut counter = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if counter[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counter[i], i);
            }
            best = best.max(value(&perm));
            counter[i] += 1;
            i = 1;
        } else {
            counter[i] = 0;
            i += 1;
        }
    }
    Ok(best)
}

/// Ordered objective of a center set, for callers that only hold centers.
pub fn centers_cost(inst: &MetricInstance, centers: &[usize], w: &WeightVector) -> Result<f64> {
    ordered_cost(w, &nearest_assignment(inst, centers)?.costs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_random_metric, metric_from_points};
    use crate::ordered_cost::TruncatedCostParams;

    fn line(xs: &[f64], k: usize) -> MetricInstance {
        let coords: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        metric_from_points(&coords, k).unwrap()
    }

    #[test]
    fn line_optima() {
        let inst = line(&[0.0, 1.0, 2.0, 3.0], 2);
        let (sol, o) = brute_force_ordered(&inst, &WeightVector::kmedian(4), DEFAULT_CAP).unwrap();
        assert_eq!(sol.cost, Some(2.0));
        assert_eq!(o, vec![1.0, 1.0, 0.0, 0.0]);
        let (sol, _) = brute_force_ordered(&inst, &WeightVector::kcenter(4), DEFAULT_CAP).unwrap();
        assert_eq!(sol.cost, Some(1.0));
    }

    #[test]
    fn zero_optimum() {
        let inst = line(&[0.0, 0.0, 5.0, 5.0], 2);
        let (sol, o) = brute_force_ordered(&inst, &WeightVector::kmedian(4), DEFAULT_CAP).unwrap();
        assert_eq!(sol.cost, Some(0.0));
        assert!(o.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cap_is_enforced() {
        let inst = gen_random_metric(10, 5, 1, 1.0).unwrap();
        assert_eq!(
            brute_force_ordered(&inst, &WeightVector::kmedian(10), 100).map(|_| ()),
            Err(Error::OracleCap { subsets: 252, cap: 100 })
        );
    }

    #[test]
    fn proxy_sum() {
        let inst = line(&[0.0, 1.0, 2.0, 3.0], 2);
        let (_, v) = brute_force_proxy_sum(&inst, &ProxySpec::Identity, &[1; 4], DEFAULT_CAP).unwrap();
        assert_eq!(v, 2.0);
        let (_, v) = brute_force_proxy_sum(&inst, &ProxySpec::Identity, &[1, 1, 1, 5], DEFAULT_CAP).unwrap();
        assert_eq!(v, 2.0);
        let zero = ProxySpec::Truncated(TruncatedCostParams::new(10.0, 1).unwrap());
        assert_eq!(brute_force_proxy_sum(&inst, &zero, &[1; 4], DEFAULT_CAP).unwrap().1, 0.0);
    }

    #[test]
    fn permutations() {
        let w = WeightVector::new(vec![1.0, 1.0, 0.0]).unwrap();
        assert_eq!(permutation_cost_max(&w, &[5.0, 2.0, 7.0]).unwrap(), 12.0);
        let w = WeightVector::new(vec![2.0; 4]).unwrap();
        assert_eq!(permutation_cost_max(&w, &[1.0, 2.0, 3.0, 4.0]).unwrap(), 20.0);
        let w = WeightVector::new(vec![3.0, 2.0, 1.0]).unwrap();
        assert_eq!(permutation_cost_max(&w, &[4.0; 3]).unwrap(), 24.0);
        assert!(permutation_cost_max(&WeightVector::kmedian(9), &[0.0; 9]).is_err());
    }

    #[test]
    fn relabeling_preserves_optimum() {
        for seed in 0..20 {
            let inst = gen_random_metric(7, 3, seed, 10.0).unwrap();
            let w = WeightVector::new(vec![5.0, 3.0, 3.0, 1.0, 1.0, 0.5, 0.0]).unwrap();
            let perm = [3usize, 6, 0, 5, 1, 4, 2];
            let relabeled = inst.restrict(&perm, 3).unwrap();
            let a = brute_force_ordered(&inst, &w, DEFAULT_CAP).unwrap().0.cost.unwrap();
            let b = brute_force_ordered(&relabeled, &w, DEFAULT_CAP).unwrap().0.cost.unwrap();
            assert!((a - b).abs() <= 1e-12 * (1.0 + a));
        }
    }
}
