//! General-weight ordered k-median.
//!
//! Weights are truncated first, then every guess `(M, w_est)` of the
//! surrogate stream is solved with the Lagrangian search on the surrogate
//! proxy (rounding a bracket if needed). The candidate with the smallest true
//! objective under the original weights wins.

use alloc::vec::Vec;

use crate::bipoint::{make_bipoint, round_bipoint, RoundingMode};
use crate::centrum::{better, certified_search, summarize_bracket, BracketSummary};
use crate::instance::{nearest_assignment, MetricInstance, Solution, WeightVector};
use crate::ordered_cost::{
    enumerate_surrogate_guesses, truncate_weights, wavg_from_opt, weight_levels, IntervalGrid,
    ProxySpec, SurrogateParams,
};
use crate::primal_dual::{LambdaOutcome, RunObserver};
use crate::tol;
use crate::{Error, Result};

/// Default ceiling on the number of guesses a solve may enumerate.
pub const DEFAULT_GUESS_CAP: u128 = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub enum GuessPath {
    /// Every surrogate distance is zero; the centers are arbitrary.
    ZeroProxy,
    ExactK { lambda: f64, dual: f64 },
    Bracket(BracketSummary),
}

/// Result of one guess.
#[derive(Debug, Clone, PartialEq)]
pub struct GuessOutcome {
    pub solution: Solution,
    /// `Σ_j demand... g(9; c_j)` over the returned assignment.
    pub ledger: f64,
    /// A value `≤ OPT` of the surrogate LP (feasible dual objective).
    pub dual: f64,
    /// Additive slack from the price gap of a bracket (zero otherwise).
    pub gap: f64,
    pub path: GuessPath,
    pub pd_runs: usize,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter("eps must lie in (0, 1]"));
    }
    Ok(())
}

/// Solve one guess, returning `k` centers whose `g(9; ·)` ledger is at most
/// `9·(dual + gap)`.
pub fn solve_fixed_guess(inst: &MetricInstance, sp: &SurrogateParams, eps: f64) -> Result<GuessOutcome> {
    solve_fixed_guess_with(inst, sp, eps, &mut |_, _, _| {})
}

pub fn solve_fixed_guess_with(
    inst: &MetricInstance,
    sp: &SurrogateParams,
    eps: f64,
    observe: &mut RunObserver,
) -> Result<GuessOutcome> {
    check_eps(eps)?;
    if sp.grid().n() != inst.n() {
        return Err(Error::LengthMismatch { expected: inst.n(), found: sp.grid().n() });
    }
    let n = inst.n();
    let proxy = ProxySpec::surrogate(sp.clone(), 1.0)?;
    let proxy3 = proxy.dilate(3.0);
    let proxy9 = proxy.dilate(9.0);
    let unit = alloc::vec![1u64; n];
    let tol_lambda = eps * sp.w1_trunc() * sp.m() / n as f64;
    let mut runs = 0;
    let outcome = if tol_lambda > 0.0 {
        certified_search(inst, &proxy, &unit, tol_lambda, &mut runs, observe)
    } else {
        Err(Error::ZeroProxy)
    };
    let outcome = match outcome {
        Err(Error::ZeroProxy) => {
            let mut centers = inst.distinct_points();
            centers.truncate(inst.k());
            let solution = nearest_assignment(inst, &centers)?;
            let ledger = solution.costs.iter().map(|&c| proxy9.eval(c)).sum();
            return Ok(GuessOutcome { solution, ledger, dual: 0.0, gap: 0.0, path: GuessPath::ZeroProxy, pd_runs: runs });
        }
        other => other?,
    };
    let (solution, dual, gap, path) = match outcome {
        LambdaOutcome::ExactK(res) => {
            let sol = res.solution(inst)?;
            let dual = res.dual_objective(inst.k());
            (sol, dual, 0.0, GuessPath::ExactK { lambda: res.lambda, dual })
        }
        LambdaOutcome::Bracket(lo, hi) => {
            let bp = make_bipoint(inst, lo, hi, inst.k(), &proxy3)?;
            let rep = round_bipoint(inst, &bp, RoundingMode::General)?;
            let s = summarize_bracket(&bp.res1, &bp.res2, bp.k, bp.combined_cost(), bp.a, bp.b, &rep)?;
            let (dual, gap) = (s.dual, s.gap);
            (rep.solution, dual, gap, GuessPath::Bracket(s))
        }
    };
    let ledger: f64 = solution.costs.iter().map(|&c| proxy9.eval(c)).sum();
    let cap = 9.0 * (dual + gap);
    if !tol::le_rel(ledger, cap, tol::EXACT_REL) {
        return Err(Error::Certificate { what: "surrogate ledger against duals", lhs: ledger, rhs: cap });
    }
    Ok(GuessOutcome { solution, ledger, dual, gap, path, pd_runs: runs })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderedOptions {
    pub guess_cap: u128,
}

impl Default for OrderedOptions {
    fn default() -> Self {
        OrderedOptions { guess_cap: DEFAULT_GUESS_CAP }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderedReport {
    /// Nearest-assigned, `cost` set to the objective under the original
    /// weights.
    pub solution: Solution,
    /// Index of the winning guess in the enumeration order, with the guess.
    pub guess: Option<(usize, SurrogateParams)>,
    pub guesses: u128,
    pub w_trunc: WeightVector,
}

/// Trivial answers that bypass the enumeration, if any apply.
pub fn trivial_ordered(inst: &MetricInstance, w: &WeightVector, eps: f64) -> Result<Option<OrderedReport>> {
    check_eps(eps)?;
    if w.len() != inst.n() {
        return Err(Error::LengthMismatch { expected: inst.n(), found: w.len() });
    }
    let w_trunc = truncate_weights(w, eps);
    let reps = inst.distinct_points();
    if w.is_zero() || reps.len() <= inst.k() {
        let mut centers = reps;
        centers.truncate(inst.k());
        let solution = nearest_assignment(inst, &centers)?.evaluate(w)?;
        return Ok(Some(OrderedReport { solution, guess: None, guesses: 0, w_trunc }));
    }
    Ok(None)
}

/// Every guess of the stream, after checking the cap.
pub fn collect_guesses(inst: &MetricInstance, w: &WeightVector, eps: f64, cap: u128) -> Result<Vec<SurrogateParams>> {
    let w_trunc = truncate_weights(w, eps);
    let stream = enumerate_surrogate_guesses(inst, &w_trunc, eps)?;
    let total = stream.total();
    if total > cap {
        return Err(Error::GuessCap { guesses: total, cap });
    }
    Ok(stream.collect())
}

/// Candidate for one guess, scored under the original weights.
pub fn score_guess(inst: &MetricInstance, w: &WeightVector, sp: &SurrogateParams, eps: f64) -> Result<Solution> {
    score_guess_with(inst, w, sp, eps, &mut |_, _, _| {})
}

pub fn score_guess_with(
    inst: &MetricInstance,
    w: &WeightVector,
    sp: &SurrogateParams,
    eps: f64,
    observe: &mut RunObserver,
) -> Result<Solution> {
    solve_fixed_guess_with(inst, sp, eps, observe)?.solution.evaluate(w)
}

/// Deterministic best-of over candidates listed in enumeration order.
pub fn pick_best(candidates: Vec<Solution>) -> Option<(usize, Solution)> {
    let mut best: Option<(usize, Solution)> = None;
    for (id, sol) in candidates.into_iter().enumerate() {
        if best.as_ref().map_or(true, |b| better(&sol, &b.1)) {
            best = Some((id, sol));
        }
    }
    best
}

pub fn solve_ordered(inst: &MetricInstance, w: &WeightVector, eps: f64, opts: OrderedOptions) -> Result<OrderedReport> {
    solve_ordered_with(inst, w, eps, opts, &mut |_, _, _| {})
}

pub fn solve_ordered_with(
    inst: &MetricInstance,
    w: &WeightVector,
    eps: f64,
    opts: OrderedOptions,
    observe: &mut RunObserver,
) -> Result<OrderedReport> {
    if let Some(rep) = trivial_ordered(inst, w, eps)? {
        return Ok(rep);
    }
    let guesses = collect_guesses(inst, w, eps, opts.guess_cap)?;
    let candidates =
        guesses.iter().map(|sp| score_guess_with(inst, w, sp, eps, observe)).collect::<Result<Vec<_>>>()?;
    let count = guesses.len() as u128;
    let (id, solution) = pick_best(candidates).ok_or(Error::InvalidParameter("no guesses"))?;
    Ok(OrderedReport { solution, guess: Some((id, guesses[id].clone())), guesses: count, w_trunc: truncate_weights(w, eps) })
}

/// The guess built from a known optimal cost vector: `M = o↓₁` and each
/// `w_est[r]` the smallest allowed level at or above the interval average.
pub fn premise_guess(o_sorted: &[f64], w_trunc: &WeightVector, eps: f64) -> Result<SurrogateParams> {
    let n = o_sorted.len();
    let m = o_sorted.first().copied().unwrap_or(0.0);
    let grid = IntervalGrid::new(m, eps, n)?;
    let avg = wavg_from_opt(o_sorted, w_trunc, &grid);
    let levels = weight_levels(w_trunc.first(), eps, n);
    let top = *levels.last().ok_or(Error::InvalidWeights("all-zero objective"))?;
    let w_est = avg.iter().map(|&a| levels.iter().copied().find(|&l| l >= a).unwrap_or(top)).collect();
    SurrogateParams::from_grid(grid, w_trunc.first(), w_est)
}
