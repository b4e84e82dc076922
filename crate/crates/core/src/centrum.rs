//! ℓ-centrum solvers: minimize the sum of the `ℓ` largest assignment costs.
//!
//! Both pipelines start from `B̄`, the smallest budget on a geometric grid
//! whose truncated-cost LP value is at most the budget itself. The
//! primal-dual pipeline runs the Lagrangian search on the truncated proxy and
//! rounds a bracket if needed. The LP-reduction pipeline consolidates clients
//! around the LP solution into a weighted k-median instance and hands it to a
//! pluggable k-median solver.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::bipoint::{make_bipoint, round_bipoint, RoundingMode, RoundingReport};
use crate::instance::{nearest_assignment, MetricInstance, Solution, WeightVector};
use crate::lp::{solve_pb, PbSolution};
use crate::oracle::{brute_force_proxy_sum, DEFAULT_CAP};
use crate::ordered_cost::{ordered_cost, ProxySpec, TruncatedCostParams};
use crate::primal_dual::{
    certificate_check, check_dual_feasibility, check_pruning, lambda_search_with, LambdaOutcome, PdResult,
    RunObserver,
};
use crate::tol;
use crate::{Error, Result};

/// Powers `d_min⁺·(1+ε)^t`, up to and including the first one `≥ n·d_max`.
pub fn budget_grid(inst: &MetricInstance, eps: f64) -> Vec<f64> {
    let Some(lo) = inst.min_positive_distance() else {
        return Vec::new();
    };
    let top = inst.n() as f64 * inst.max_distance();
    let mut grid = Vec::new();
    let mut t = 0i32;
    loop {
        let b = lo * libm::pow(1.0 + eps, t as f64);
        grid.push(b);
        if b >= top {
            return grid;
        }
        t += 1;
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter("eps must be positive"));
    }
    Ok(())
}

fn check_ell(inst: &MetricInstance, ell: usize) -> Result<()> {
    if ell == 0 || ell > inst.n() {
        return Err(Error::InvalidWeights("centrum size must be in [1, n]"));
    }
    Ok(())
}

/// `B̄` together with the optimal LP solution at `B̄` (absent when `B̄ = 0`).
pub fn find_bbar_with_lp(inst: &MetricInstance, ell: usize, eps: f64) -> Result<(f64, Option<PbSolution>)> {
    check_eps(eps)?;
    check_ell(inst, ell)?;
    if inst.distinct_points().len() <= inst.k() {
        return Ok((0.0, None));
    }
    let grid = budget_grid(inst, eps);
    let unit = vec![1u64; inst.n()];
    let solve_at = |b: f64| -> Result<PbSolution> {
        let proxy = ProxySpec::Truncated(TruncatedCostParams::new(b, ell)?);
        solve_pb(inst, &proxy, &unit)
    };
    let feasible = |b: f64, s: &PbSolution| s.value <= b * (1.0 + tol::EXACT_REL);
    // the top of the grid is always feasible: its threshold exceeds every distance
    let (mut lo, mut hi) = (0usize, grid.len() - 1);
    let mut hi_sol = solve_at(grid[hi])?;
    let first = solve_at(grid[0])?;
    if feasible(grid[0], &first) {
        return Ok((grid[0], Some(first)));
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        let s = solve_at(grid[mid])?;
        if feasible(grid[mid], &s) {
            hi = mid;
            hi_sol = s;
        } else {
            lo = mid;
        }
    }
    Ok((grid[hi], Some(hi_sol)))
}

pub fn find_bbar(inst: &MetricInstance, ell: usize, eps: f64) -> Result<f64> {
    find_bbar_with_lp(inst, ell, eps).map(|r| r.0)
}

/// Pipeline options shared by the ℓ-centrum solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentrumOptions {
    /// Use the refined opening rule in bipoint rounding.
    pub improved: bool,
    /// Try every grid budget without solving LPs and keep the best.
    pub scan_b: bool,
}

impl Default for CentrumOptions {
    fn default() -> Self {
        CentrumOptions { improved: true, scan_b: false }
    }
}

/// How the primal-dual pipeline produced its centers.
#[derive(Debug, Clone, PartialEq)]
pub enum CentrumPath {
    /// At most `k` distinct points: cost zero.
    Colocated,
    /// Every truncated distance is zero at this budget; any `k` centers do.
    ZeroProxy,
    ExactK { lambda: f64, dual: f64 },
    Bracket(BracketSummary),
}

/// Quantities of the bracket analysis, recorded for external checking.
#[derive(Debug, Clone, PartialEq)]
pub struct BracketSummary {
    pub k1: usize,
    pub k2: usize,
    pub a: f64,
    pub b: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `a·C₁ + b·C₂`.
    pub combined: f64,
    /// `a(Σα₁ − kλ₂) + b(Σα₂ − kλ₂)`, a convex combination of feasible dual
    /// values at price `λ₂`.
    pub dual: f64,
    /// `a·k₁·(λ₂ − λ₁)`.
    pub gap: f64,
    pub shortcut: bool,
    /// Objective of the integral opening (absent on the shortcut path).
    pub opening_objective: Option<f64>,
    pub fractional_objective: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentrumReport {
    /// Nearest-assigned, `cost` set to the ℓ-centrum objective.
    pub solution: Solution,
    pub bbar: f64,
    pub path: CentrumPath,
    /// Number of dual ascent runs, all certified.
    pub pd_runs: usize,
}

/// The first `k` distinct points, as a fallback center set.
fn some_centers(inst: &MetricInstance) -> Vec<usize> {
    let mut reps = inst.distinct_points();
    reps.truncate(inst.k());
    reps
}

/// Lambda search that certifies every probe.
pub(crate) fn certified_search(
    inst: &MetricInstance,
    proxy: &ProxySpec,
    demands: &[u64],
    tol: f64,
    runs: &mut usize,
    observe: &mut RunObserver,
) -> Result<LambdaOutcome> {
    let proxy3 = proxy.dilate(3.0);
    lambda_search_with(inst, proxy, demands, tol, &mut |res: &PdResult| {
        *runs += 1;
        observe(inst, proxy, res);
        check_dual_feasibility(res)?;
        check_pruning(res)?;
        certificate_check(inst, res, &proxy3)?;
        Ok(())
    })
}

/// Summarize a rounded bracket and verify the dual chain
/// `aC₁ + bC₂ ≤ 3[a(Σα₁ − k₁λ₁) + b(Σα₂ − k₂λ₂)] = 3·dual + 3·gap`.
pub(crate) fn summarize_bracket(
    lo: &PdResult,
    hi: &PdResult,
    k: usize,
    combined: f64,
    a: f64,
    b: f64,
    rep: &RoundingReport,
) -> Result<BracketSummary> {
    let (k1, k2) = (lo.num_centers(), hi.num_centers());
    let own = a * lo.dual_objective(k1) + b * hi.dual_objective(k2);
    let price = k as f64 * hi.lambda;
    let dual = a * (lo.weighted_alpha_sum() - price) + b * (hi.weighted_alpha_sum() - price);
    let gap = a * k1 as f64 * (hi.lambda - lo.lambda);
    if !tol::le_rel(combined, 3.0 * own, tol::EXACT_REL) {
        return Err(Error::Certificate { what: "bipoint cost against its duals", lhs: combined, rhs: 3.0 * own });
    }
    if !tol::le_rel(own, dual + gap, tol::EXACT_REL) {
        return Err(Error::Certificate { what: "bipoint dual shift", lhs: own, rhs: dual + gap });
    }
    Ok(BracketSummary {
        k1,
        k2,
        a,
        b,
        lambda1: lo.lambda,
        lambda2: hi.lambda,
        combined,
        dual,
        gap,
        shortcut: rep.shortcut,
        opening_objective: rep.choice.as_ref().map(|c| c.objective),
        fractional_objective: rep.fractional,
    })
}

/// The primal-dual ℓ-centrum pipeline at a fixed budget `bbar > 0`.
pub fn solve_centrum_pd_at(
    inst: &MetricInstance,
    ell: usize,
    eps: f64,
    bbar: f64,
    opts: CentrumOptions,
) -> Result<CentrumReport> {
    solve_centrum_pd_at_with(inst, ell, eps, bbar, opts, &mut |_, _, _| {})
}

pub fn solve_centrum_pd_at_with(
    inst: &MetricInstance,
    ell: usize,
    eps: f64,
    bbar: f64,
    opts: CentrumOptions,
    observe: &mut RunObserver,
) -> Result<CentrumReport> {
    check_eps(eps)?;
    check_ell(inst, ell)?;
    let w = WeightVector::centrum(inst.n(), ell)?;
    let params = TruncatedCostParams::new(bbar, ell)?;
    let proxy = ProxySpec::Truncated(params);
    let proxy3 = proxy.dilate(3.0);
    let n = inst.n();
    let unit = vec![1u64; n];
    let mut runs = 0;
    let outcome = match certified_search(inst, &proxy, &unit, eps * bbar / n as f64, &mut runs, observe) {
        Err(Error::ZeroProxy) => {
            let solution = nearest_assignment(inst, &some_centers(inst))?.evaluate(&w)?;
            return Ok(CentrumReport { solution, bbar, path: CentrumPath::ZeroProxy, pd_runs: runs });
        }
        other => other?,
    };
    let (solution, path) = match outcome {
        LambdaOutcome::ExactK(res) => {
            let sol = res.solution(inst)?;
            let dual = res.dual_objective(inst.k());
            let far: f64 = sol.costs.iter().map(|&c| proxy3.eval(c)).sum();
            if !tol::le_rel(far, 3.0 * dual, tol::EXACT_REL) {
                return Err(Error::Certificate { what: "exact-k cost against duals", lhs: far, rhs: 3.0 * dual });
            }
            (sol, CentrumPath::ExactK { lambda: res.lambda, dual })
        }
        LambdaOutcome::Bracket(lo, hi) => {
            let bp = make_bipoint(inst, lo, hi, inst.k(), &proxy3)?;
            let rep = round_bipoint(inst, &bp, RoundingMode::Centrum { improved: opts.improved })?;
            let summary = summarize_bracket(&bp.res1, &bp.res2, bp.k, bp.combined_cost(), bp.a, bp.b, &rep)?;
            let cost = ordered_cost(&w, &rep.solution.costs)?;
            let cap = match &rep.choice {
                None => bp.c2 + 3.0 * bbar,
                Some(c) => c.objective + if opts.improved { 6.0 } else { 9.0 } * bbar,
            };
            if !tol::le_rel(cost, cap, tol::EXACT_REL) {
                return Err(Error::Certificate { what: "rounded cost against opening objective", lhs: cost, rhs: cap });
            }
            (rep.solution, CentrumPath::Bracket(summary))
        }
    };
    let solution = solution.evaluate(&w)?;
    Ok(CentrumReport { solution, bbar, path, pd_runs: runs })
}

fn colocated(inst: &MetricInstance, ell: usize) -> Result<CentrumReport> {
    let w = WeightVector::centrum(inst.n(), ell)?;
    let solution = nearest_assignment(inst, &inst.distinct_points())?.evaluate(&w)?;
    Ok(CentrumReport { solution, bbar: 0.0, path: CentrumPath::Colocated, pd_runs: 0 })
}

/// Smaller cost wins; equal costs go to the lexicographically smaller centers.
pub fn better(a: &Solution, b: &Solution) -> bool {
    match (a.cost, b.cost) {
        (Some(x), Some(y)) if x != y => x < y,
        _ => a.centers < b.centers,
    }
}

/// The primal-dual ℓ-centrum pipeline.
pub fn solve_centrum_pd(inst: &MetricInstance, ell: usize, eps: f64, opts: CentrumOptions) -> Result<CentrumReport> {
    solve_centrum_pd_with(inst, ell, eps, opts, &mut |_, _, _| {})
}

pub fn solve_centrum_pd_with(
    inst: &MetricInstance,
    ell: usize,
    eps: f64,
    opts: CentrumOptions,
    observe: &mut RunObserver,
) -> Result<CentrumReport> {
    check_eps(eps)?;
    check_ell(inst, ell)?;
    if inst.distinct_points().len() <= inst.k() {
        return colocated(inst, ell);
    }
    if opts.scan_b {
        let mut best: Option<CentrumReport> = None;
        for b in budget_grid(inst, eps) {
            let rep = solve_centrum_pd_at_with(inst, ell, eps, b, opts, observe)?;
            if best.as_ref().map_or(true, |cur| better(&rep.solution, &cur.solution)) {
                best = Some(rep);
            }
        }
        return best.ok_or(Error::InvalidParameter("empty budget grid"));
    }
    let bbar = find_bbar(inst, ell, eps)?;
    solve_centrum_pd_at_with(inst, ell, eps, bbar, opts, observe)
}

/// Consolidated weighted k-median instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    /// Per-client LP service cost `Σ_i f_B̄(c_ij)·x_ij`.
    pub lp_cost: Vec<f64>,
    /// Cluster centers `D′`, ascending.
    pub centers: Vec<usize>,
    /// Consolidated demand per point (zero off `D′`).
    pub demands: Vec<u64>,
    /// Cluster center each client's demand moved to.
    pub sigma: Vec<usize>,
}

impl Reduction {
    /// `Σ_{j∈D′} d′_j · LP_j`.
    pub fn consolidated_cost(&self) -> f64 {
        self.centers.iter().map(|&j| self.demands[j] as f64 * self.lp_cost[j]).sum()
    }

    pub fn demands_on_centers(&self) -> Vec<u64> {
        self.centers.iter().map(|&j| self.demands[j]).collect()
    }
}

/// Scan clients by increasing LP cost; merge each into the smallest-index
/// existing center within `2B̄/ℓ`, or make it a new center.
pub fn reduce_to_kmedian(inst: &MetricInstance, ell: usize, bbar: f64, pb: &PbSolution) -> Result<Reduction> {
    check_ell(inst, ell)?;
    let n = inst.n();
    if pb.x.len() != n * n {
        return Err(Error::LengthMismatch { expected: n * n, found: pb.x.len() });
    }
    let params = TruncatedCostParams::new(bbar, ell)?;
    let proxy = ProxySpec::Truncated(params);
    let lp_cost: Vec<f64> =
        (0..n).map(|j| (0..n).map(|i| proxy.eval(inst.d(i, j)) * pb.x[i * n + j]).sum()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| lp_cost[a].total_cmp(&lp_cost[b]).then(a.cmp(&b)));
    let radius = 2.0 * bbar / ell as f64;
    let mut demands = vec![0u64; n];
    let mut sigma = vec![0usize; n];
    let mut centers: Vec<usize> = Vec::new();
    for k in order {
        match centers.iter().copied().filter(|&j| inst.d(j, k) <= radius).min() {
            Some(j) => {
                demands[j] += 1;
                sigma[k] = j;
            }
            None => {
                demands[k] = 1;
                sigma[k] = k;
                centers.push(k);
            }
        }
    }
    centers.sort_unstable();
    Ok(Reduction { lp_cost, centers, demands, sigma })
}

/// A k-median routine on weighted instances, used by the LP-reduction
/// pipeline.
pub trait KMedianSolver {
    fn name(&self) -> &'static str;

    /// At most `inst.k()` centers for demands `demands`.
    fn solve(&self, inst: &MetricInstance, demands: &[u64], observe: &mut RunObserver) -> Result<Vec<usize>>;
}

/// Exhaustive search over center sets.
#[derive(Debug, Clone, Copy)]
pub struct BruteForceKMedian {
    pub cap: u128,
}

impl Default for BruteForceKMedian {
    fn default() -> Self {
        BruteForceKMedian { cap: DEFAULT_CAP }
    }
}

impl KMedianSolver for BruteForceKMedian {
    fn name(&self) -> &'static str {
        "brute-force"
    }

    fn solve(&self, inst: &MetricInstance, demands: &[u64], _: &mut RunObserver) -> Result<Vec<usize>> {
        Ok(brute_force_proxy_sum(inst, &ProxySpec::Identity, demands, self.cap)?.0.centers)
    }
}

/// Identity-proxy Lagrangian search with bipoint rounding.
#[derive(Debug, Clone, Copy)]
pub struct LagrangianKMedian {
    pub eps: f64,
}

impl KMedianSolver for LagrangianKMedian {
    fn name(&self) -> &'static str {
        "lagrangian"
    }

    fn solve(&self, inst: &MetricInstance, demands: &[u64], observe: &mut RunObserver) -> Result<Vec<usize>> {
        check_eps(self.eps)?;
        let tol = self.eps * inst.max_distance().max(f64::MIN_POSITIVE) / inst.n() as f64;
        let mut runs = 0;
        match certified_search(inst, &ProxySpec::Identity, demands, tol, &mut runs, observe) {
            Err(Error::ZeroProxy) => Ok(some_centers(inst)),
            Err(e) => Err(e),
            Ok(LambdaOutcome::ExactK(res)) => Ok(res.centers),
            Ok(LambdaOutcome::Bracket(lo, hi)) => {
                let bp = make_bipoint(inst, lo, hi, inst.k(), &ProxySpec::Identity)?;
                Ok(round_bipoint(inst, &bp, RoundingMode::Centrum { improved: true })?.solution.centers)
            }
        }
    }
}

/// Fractional k-median solution on the consolidated instance, built from the
/// LP solution by grouping facilities around their nearest cluster center.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsolidatedFractional {
    /// `X[a·m + b]`: center `D′[a]` serving client `D′[b]`.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub objective: f64,
    /// Largest violation of coverage, linking and budget constraints.
    pub violation: f64,
}

pub fn consolidated_fractional(
    inst: &MetricInstance,
    red: &Reduction,
    pb: &PbSolution,
) -> ConsolidatedFractional {
    let n = inst.n();
    let dp = &red.centers;
    let m = dp.len();
    // group of every point: nearest cluster center, ties to the smallest index
    let group: Vec<usize> = (0..n)
        .map(|i| {
            let mut best = 0;
            for a in 1..m {
                if inst.d(i, dp[a]) < inst.d(i, dp[best]) {
                    best = a;
                }
            }
            best
        })
        .collect();
    let mut y = vec![0.0; m];
    for i in 0..n {
        y[group[i]] += pb.y[i];
    }
    let mut x = vec![0.0; m * m];
    for (b, &j) in dp.iter().enumerate() {
        for i in 0..n {
            let a = group[i];
            if a != b {
                x[a * m + b] += pb.x[i * n + j];
            }
        }
        x[b * m + b] = y[b];
    }
    let mut violation = (y.iter().sum::<f64>() - inst.k() as f64).max(0.0);
    let mut objective = 0.0;
    for b in 0..m {
        let cover: f64 = (0..m).map(|a| x[a * m + b]).sum();
        violation = violation.max(1.0 - cover);
        for a in 0..m {
            violation = violation.max(x[a * m + b] - y[a]);
            objective += red.demands[dp[b]] as f64 * inst.d(dp[a], dp[b]) * x[a * m + b];
        }
    }
    ConsolidatedFractional { x, y, objective, violation }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpReduceReport {
    pub solution: Solution,
    pub bbar: f64,
    /// `OPT_{B̄}`.
    pub lp_value: f64,
    pub reduction: Option<Reduction>,
    pub fractional: Option<ConsolidatedFractional>,
    /// Weighted k-median cost `C` of the chosen centers on the consolidated
    /// instance.
    pub kmedian_cost: f64,
    /// ℓ-centrum cost when every client follows its cluster center.
    pub mapped_cost: f64,
}

/// The LP-reduction ℓ-centrum pipeline.
pub fn solve_centrum_lp_reduce(
    inst: &MetricInstance,
    ell: usize,
    eps: f64,
    solver: &dyn KMedianSolver,
) -> Result<LpReduceReport> {
    solve_centrum_lp_reduce_with(inst, ell, eps, solver, &mut |_, _, _| {})
}

pub fn solve_centrum_lp_reduce_with(
    inst: &MetricInstance,
    ell: usize,
    eps: f64,
    solver: &dyn KMedianSolver,
    observe: &mut RunObserver,
) -> Result<LpReduceReport> {
    let (bbar, pb) = find_bbar_with_lp(inst, ell, eps)?;
    let w = WeightVector::centrum(inst.n(), ell)?;
    let Some(pb) = pb else {
        let solution = colocated(inst, ell)?.solution;
        return Ok(LpReduceReport {
            solution,
            bbar,
            lp_value: 0.0,
            reduction: None,
            fractional: None,
            kmedian_cost: 0.0,
            mapped_cost: 0.0,
        });
    };
    let red = reduce_to_kmedian(inst, ell, bbar, &pb)?;
    let radius = 2.0 * bbar / ell as f64;
    for (x, &a) in red.centers.iter().enumerate() {
        for &b in &red.centers[x + 1..] {
            if inst.d(a, b) <= radius {
                return Err(Error::Certificate { what: "cluster centers separated", lhs: inst.d(a, b), rhs: radius });
            }
        }
    }
    let consolidated = red.consolidated_cost();
    if !tol::le_rel(consolidated, pb.value, tol::EXACT_REL) {
        return Err(Error::Certificate { what: "consolidated LP cost", lhs: consolidated, rhs: pb.value });
    }
    let frac = consolidated_fractional(inst, &red, &pb);
    if frac.violation > tol::EXACT_REL {
        return Err(Error::Certificate { what: "consolidated fractional feasibility", lhs: frac.violation, rhs: 0.0 });
    }
    if !tol::le_rel(frac.objective, 2.0 * consolidated, tol::EXACT_REL) {
        return Err(Error::Certificate {
            what: "consolidated fractional objective",
            lhs: frac.objective,
            rhs: 2.0 * consolidated,
        });
    }

    let centers: Vec<usize> = if red.centers.len() <= inst.k() {
        red.centers.clone()
    } else {
        let sub = inst.restrict(&red.centers, inst.k())?;
        let picked = solver.solve(&sub, &red.demands_on_centers(), observe)?;
        if picked.is_empty() || picked.len() > inst.k() {
            return Err(Error::Certificate {
                what: "k-median solver center count",
                lhs: picked.len() as f64,
                rhs: inst.k() as f64,
            });
        }
        picked.into_iter().map(|a| red.centers[a]).collect()
    };
    let on_centers = nearest_assignment(inst, &centers)?;
    let kmedian_cost: f64 =
        red.centers.iter().map(|&j| red.demands[j] as f64 * on_centers.costs[j]).sum();
    let mapped: Vec<f64> = (0..inst.n()).map(|k| inst.d(on_centers.assign[red.sigma[k]], k)).collect();
    let mapped_cost = ordered_cost(&w, &mapped)?;
    let cap = kmedian_cost + 2.0 * bbar;
    if !tol::le_rel(mapped_cost, cap, tol::EXACT_REL) {
        return Err(Error::Certificate { what: "mapped cost against k-median cost", lhs: mapped_cost, rhs: cap });
    }
    let solution = on_centers.evaluate(&w)?;
    Ok(LpReduceReport {
        solution,
        bbar,
        lp_value: pb.value,
        reduction: Some(red),
        fractional: Some(frac),
        kmedian_cost,
        mapped_cost,
    })
}

/// Boxed bundled solver by name (`lagrangian` or `brute-force`).
pub fn kmedian_solver(name: &str, eps: f64) -> Option<Box<dyn KMedianSolver + Send + Sync>> {
    match name {
        "lagrangian" => Some(Box::new(LagrangianKMedian { eps })),
        "brute-force" => Some(Box::new(BruteForceKMedian::default())),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_random_metric, metric_from_points};
    use crate::oracle::brute_force_ordered;

    fn line(xs: &[f64], k: usize) -> MetricInstance {
        let coords: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        metric_from_points(&coords, k).unwrap()
    }

    #[test]
    fn colocated_groups_cost_nothing() {
        let inst = line(&[0.0, 0.0, 4.0, 4.0, 4.0], 2);
        assert_eq!(find_bbar(&inst, 2, 0.1).unwrap(), 0.0);
        let rep = solve_centrum_pd(&inst, 2, 0.1, CentrumOptions::default()).unwrap();
        assert_eq!(rep.solution.cost, Some(0.0));
        assert_eq!(rep.path, CentrumPath::Colocated);
        let rep = solve_centrum_lp_reduce(&inst, 2, 0.1, &BruteForceKMedian::default()).unwrap();
        assert_eq!(rep.solution.cost, Some(0.0));
    }

    #[test]
    fn line_kcenter() {
        let inst = line(&[0.0, 1.0, 2.0, 3.0], 2);
        let rep = solve_centrum_pd(&inst, 1, 0.1, CentrumOptions::default()).unwrap();
        assert!(rep.solution.cost.unwrap() <= 12.4);
        assert!(rep.bbar <= 1.1 + 1e-12);
    }

    #[test]
    fn grid_top_is_feasible() {
        let inst = gen_random_metric(6, 2, 5, 10.0).unwrap();
        let grid = budget_grid(&inst, 0.5);
        let top = *grid.last().unwrap();
        assert!(top >= 6.0 * inst.max_distance());
        let p = ProxySpec::Truncated(TruncatedCostParams::new(top, 6).unwrap());
        assert_eq!(crate::lp::lp_opt_value(&inst, &p, &[1; 6]).unwrap(), 0.0);
    }

    #[test]
    fn bbar_within_factor_of_opt() {
        for seed in 0..30 {
            let n = 6 + seed as usize % 3;
            let inst = gen_random_metric(n, 2, seed, 10.0).unwrap();
            let ell = 1 + seed as usize % n;
            let w = WeightVector::centrum(n, ell).unwrap();
            let opt = brute_force_ordered(&inst, &w, DEFAULT_CAP).unwrap().0.cost.unwrap();
            let bbar = find_bbar(&inst, ell, 0.1).unwrap();
            assert!(bbar <= 1.1 * opt * (1.0 + 1e-9), "seed {seed}: {bbar} vs {opt}");
        }
    }

    #[test]
    fn reduction_without_merges() {
        let inst = line(&[0.0, 10.0, 20.0, 30.0], 2);
        let pb = solve_pb(&inst, &ProxySpec::Identity, &[1; 4]).unwrap();
        let red = reduce_to_kmedian(&inst, 4, 1.0, &pb).unwrap();
        assert_eq!(red.centers, vec![0, 1, 2, 3]);
        assert_eq!(red.demands, vec![1; 4]);
        assert_eq!(red.sigma, vec![0, 1, 2, 3]);
    }

    #[test]
    fn pipelines_run() {
        for seed in 0..10 {
            let inst = gen_random_metric(7, 2, seed, 10.0).unwrap();
            let ell = 1 + seed as usize % 7;
            let a = solve_centrum_pd(&inst, ell, 0.1, CentrumOptions::default()).unwrap();
            assert!(a.solution.cost.unwrap() <= (12.0 + 0.4) * a.bbar * (1.0 + 1e-9));
            let b = solve_centrum_lp_reduce(&inst, ell, 0.1, &LagrangianKMedian { eps: 0.1 }).unwrap();
            assert!(b.solution.cost.unwrap() <= b.mapped_cost + 1e-9);
            let red = b.reduction.unwrap();
            assert_eq!(red.demands.iter().sum::<u64>(), 7);
        }
    }

    #[test]
    fn scan_mode_runs() {
        let inst = gen_random_metric(6, 2, 3, 10.0).unwrap();
        let opts = CentrumOptions { improved: true, scan_b: true };
        let rep = solve_centrum_pd(&inst, 2, 0.5, opts).unwrap();
        assert!(rep.solution.centers.len() <= 2);
    }
}
