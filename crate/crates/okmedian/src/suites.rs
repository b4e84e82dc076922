//! Randomized verification suites behind `bench`.
//!
//! Trial `t` of a suite draws everything from a ChaCha8 stream keyed by
//! `(seed, t)`, so rows do not depend on how trials are spread over threads.
//! A trial never aborts the suite: errors from the pipelines are recorded in
//! the row and counted as violations.

use okmedian_core::centrum::{
    budget_grid, find_bbar_with_lp, kmedian_solver, solve_centrum_lp_reduce_with, solve_centrum_pd_at_with,
    CentrumOptions, CentrumPath, CentrumReport, LpReduceReport,
};
use okmedian_core::instance::{gen_euclidean, gen_random_metric};
use okmedian_core::lp::{build_pb_lp, lagrangian_dual_value, solve_lp, DenseLP, LpStatus, Sense};
use okmedian_core::oracle::{brute_force_ordered, brute_force_proxy_sum, permutation_cost_max, DEFAULT_CAP};
use okmedian_core::ordered::{collect_guesses, pick_best, premise_guess, solve_fixed_guess_with, solve_ordered, GuessPath, OrderedOptions, DEFAULT_GUESS_CAP};
use okmedian_core::ordered_cost::{
    ordered_cost, surrogate_cost, truncate_weights, truncated_cost, wavg_from_opt, weight_levels, IntervalGrid,
    SurrogateParams,
};
use okmedian_core::{MetricInstance, ProxySpec, Solution, TruncatedCostParams, WeightVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::audit::{AuditTally, Auditor, WEAK_DUALITY_ABS};
use crate::error::CliResult;
use crate::report::{Format, ReportWriter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    /// Proxy-cost, truncation and objective identities on random draws.
    Claims,
    /// Both ℓ-centrum pipelines against the brute-force optimum.
    Centrum,
    /// The general-weight pipeline with per-guess LP checks.
    Ordered,
    /// Primal and dual consistency of the simplex solver.
    Lpcheck,
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub trials: u64,
    pub seed: u64,
    /// Overrides the suite's default `ε`.
    pub eps: Option<f64>,
    /// k-median routine for the LP-reduction pipeline.
    pub kmedian: String,
}

impl SuiteConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        SuiteConfig { trials, seed, eps: None, kmedian: "brute-force".into() }
    }
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Running tally of inequality and equality checks for one trial.
#[derive(Debug, Clone, Copy, Default)]
pub struct Checks {
    pub count: u32,
    pub violations: u32,
    /// Largest relative excess `(lhs − rhs)/(1 + |rhs|)` seen.
    pub worst: f64,
}

impl Checks {
    fn record(&mut self, excess: f64, ok: bool) {
        self.count += 1;
        self.worst = if self.count == 1 { excess } else { self.worst.max(excess) };
        if !ok {
            self.violations += 1;
        }
    }

    /// `lhs ≤ rhs` up to `rel·(1 + |rhs|)`.
    pub fn le(&mut self, lhs: f64, rhs: f64, rel: f64) -> bool {
        let excess = (lhs - rhs) / (1.0 + rhs.abs());
        let ok = lhs <= rhs + rel * (1.0 + rhs.abs());
        self.record(excess, ok);
        ok
    }

    /// `lhs ≤ rhs + abs`.
    pub fn le_abs(&mut self, lhs: f64, rhs: f64, abs: f64) -> bool {
        let ok = lhs <= rhs + abs;
        self.record(lhs - rhs, ok);
        ok
    }

    /// `|a − b| ≤ rel·(1 + |b|)`; `rel = 0` demands bitwise equality.
    pub fn eq(&mut self, a: f64, b: f64, rel: f64) -> bool {
        let excess = (a - b).abs() / (1.0 + b.abs());
        let ok = if rel == 0.0 { a == b } else { (a - b).abs() <= rel * (1.0 + b.abs()) };
        self.record(excess, ok);
        ok
    }

    pub fn holds(&mut self, ok: bool) -> bool {
        self.record(if ok { 0.0 } else { 1.0 }, ok);
        ok
    }

    pub fn merge(&mut self, other: &Checks) {
        if other.count == 0 {
            return;
        }
        let first = self.count == 0;
        self.count += other.count;
        self.violations += other.violations;
        self.worst = if first { other.worst } else { self.worst.max(other.worst) };
    }
}

/// Nearest-rank quantiles `(min, p50, p90, max)` of the finite values.
pub fn quantiles(values: &[f64]) -> [Option<f64>; 4] {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return [None; 4];
    }
    v.sort_by(f64::total_cmp);
    let at = |q: f64| v[((q * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1];
    [Some(v[0]), Some(at(0.5)), Some(at(0.9)), Some(v[v.len() - 1])]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub suite: String,
    pub trials: u64,
    pub checks: u64,
    pub violations: u64,
    pub pd_runs: u64,
    pub worst_certificate: Option<f64>,
    pub worst_weak_duality: Option<f64>,
    /// Which per-trial column the ratio quantiles describe.
    pub ratio_of: String,
    pub ratio_min: Option<f64>,
    pub ratio_p50: Option<f64>,
    pub ratio_p90: Option<f64>,
    pub ratio_max: Option<f64>,
    /// A second ratio column, where the suite has one.
    pub ratio2_of: String,
    pub ratio2_max: Option<f64>,
}

impl Summary {
    fn new(suite: &str, trials: u64, checks: &Checks, audit: &AuditTally) -> Self {
        Summary {
            suite: suite.into(),
            trials,
            checks: checks.count as u64,
            violations: checks.violations as u64 + audit.violations,
            pd_runs: audit.runs,
            worst_certificate: (audit.runs > 0).then_some(audit.worst_certificate),
            worst_weak_duality: (audit.runs > 0).then_some(audit.worst_weak_duality),
            ratio_of: String::new(),
            ratio_min: None,
            ratio_p50: None,
            ratio_p90: None,
            ratio_max: None,
            ratio2_of: String::new(),
            ratio2_max: None,
        }
    }

    fn with_ratio(mut self, name: &str, values: &[f64]) -> Self {
        let [a, b, c, d] = quantiles(values);
        self.ratio_of = name.into();
        (self.ratio_min, self.ratio_p50, self.ratio_p90, self.ratio_max) = (a, b, c, d);
        self
    }

    fn with_ratio2(mut self, name: &str, values: &[f64]) -> Self {
        self.ratio2_of = name.into();
        self.ratio2_max = quantiles(values)[3];
        self
    }
}

fn run_trials<R: Send>(trials: u64, f: impl Fn(u64) -> R + Sync + Send) -> Vec<R> {
    (0..trials).into_par_iter().map(f).collect()
}

fn error_text(e: &okmedian_core::Error) -> String {
    e.to_string().replace(['\t', '\n'], " ")
}

// ---------------------------------------------------------------- claims

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimsRow {
    pub trial: u64,
    pub n: usize,
    pub checks: u32,
    pub violations: u32,
    pub worst: f64,
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> WeightVector {
    let mut w: Vec<f64> = (0..n)
        .map(|_| match rng.gen_range(0..4) {
            0 => 0.0,
            1 => rng.gen_range(0.0..0.01),
            _ => rng.gen_range(0.0..10.0),
        })
        .collect();
    w.sort_by(|a, b| b.total_cmp(a));
    WeightVector::new(w).expect("sorted nonnegative weights")
}

fn random_surrogate(rng: &mut ChaCha8Rng) -> SurrogateParams {
    let m = rng.gen_range(0.01..100.0);
    let eps = 1.0 - rng.gen_range(0.0..0.95);
    let n = rng.gen_range(2..=12);
    let w1 = rng.gen_range(0.1..10.0);
    let grid = IntervalGrid::new(m, eps, n).expect("valid grid");
    let levels = weight_levels(w1, eps, n);
    let mut w_est: Vec<f64> = (0..=grid.t()).map(|_| *levels.choose(rng).expect("levels nonempty")).collect();
    w_est.sort_by(|a, b| b.total_cmp(a));
    SurrogateParams::from_grid(grid, w1, w_est).expect("levels satisfy the surrogate invariants")
}

pub fn claims_trial(cfg: &SuiteConfig, trial: u64) -> ClaimsRow {
    let mut rng = trial_rng(cfg.seed, trial);
    let mut ck = Checks::default();
    let draw = |rng: &mut ChaCha8Rng| rng.gen_range(0.0..300.0);
    let (x, y, z) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };

    // truncated proxy
    let b = rng.gen_range(0.0..100.0);
    let ell = rng.gen_range(1..=20);
    let p = TruncatedCostParams::new(b, ell).expect("valid budget");
    let p3 = TruncatedCostParams::new(3.0 * b, ell).expect("valid budget");
    let f = |d: f64| truncated_cost(&p, d);
    ck.le(f(lo), f(hi), 0.0);
    ck.le(f((x + y + z) / 3.0), f(x).max(f(y)).max(f(z)), 1e-12);
    ck.eq(3.0 * f(x / 3.0), truncated_cost(&p3, x), 1e-12);

    // surrogate proxy
    let sp = random_surrogate(&mut rng);
    let gamma = rng.gen_range(1.0..10.0);
    let g = |gm: f64, d: f64| surrogate_cost(&sp, gm, d);
    ck.le(g(gamma, lo), g(gamma, hi), 0.0);
    let s = x + y + z;
    ck.eq(g(3.0 * gamma, s), 3.0 * g(gamma, s / 3.0), 1e-12);
    ck.le(g(3.0 * gamma, s), 3.0 * g(gamma, x).max(g(gamma, y)).max(g(gamma, z)), 1e-12);
    for proxy in [ProxySpec::Identity, ProxySpec::Truncated(p)] {
        ck.le(proxy.eval(lo), proxy.eval(hi), 0.0);
    }

    // weight truncation sandwich
    let n = rng.gen_range(1..=12);
    let w = random_weights(&mut rng, n);
    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..100.0)).collect();
    let eps = 1.0 - rng.gen_range(0.0..0.99);
    let wt = truncate_weights(&w, eps);
    let full = ordered_cost(&w, &v).expect("lengths match");
    let cut = ordered_cost(&wt, &v).expect("lengths match");
    ck.le(cut, full, 1e-12);
    ck.le((1.0 - eps) * full, cut, 1e-12);

    // sorted dot product against the permutation maximum
    let m = rng.gen_range(1..=6);
    let w = random_weights(&mut rng, m);
    let c: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..100.0)).collect();
    ck.eq(ordered_cost(&w, &c).expect("lengths match"), permutation_cost_max(&w, &c).expect("small"), 0.0);

    ClaimsRow { trial, n, checks: ck.count, violations: ck.violations, worst: ck.worst }
}

pub fn claims_suite(cfg: &SuiteConfig) -> (Vec<ClaimsRow>, Summary) {
    let rows = run_trials(cfg.trials, |t| claims_trial(cfg, t));
    let mut ck = Checks::default();
    for r in &rows {
        ck.merge(&Checks { count: r.checks, violations: r.violations, worst: r.worst });
    }
    let summary = Summary::new("claims", cfg.trials, &ck, &AuditTally::default())
        .with_ratio("worst", &rows.iter().map(|r| r.worst).collect::<Vec<_>>());
    (rows, summary)
}

// ---------------------------------------------------------------- centrum

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentrumRow {
    pub trial: u64,
    pub kind: String,
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub opt: f64,
    pub bbar: f64,
    pub lp_value: Option<f64>,
    pub pd_path: String,
    pub pd_centers: String,
    pub pd_cost: Option<f64>,
    /// `pd_cost / B̄`.
    pub pd_ratio_bbar: Option<f64>,
    pub pd_ratio_opt: Option<f64>,
    pub lr_clusters: Option<usize>,
    pub lr_kmedian_cost: Option<f64>,
    pub lr_cost: Option<f64>,
    pub lr_ratio_opt: Option<f64>,
    pub pd_runs: u64,
    pub worst_certificate: Option<f64>,
    pub worst_weak_duality: Option<f64>,
    pub checks: u32,
    pub violations: u32,
    pub error: String,
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize, k: usize) -> (String, MetricInstance) {
    let seed = rng.gen();
    if rng.gen_bool(0.5) {
        ("random".into(), gen_random_metric(n, k, seed, 10.0).expect("valid sizes"))
    } else {
        let dim = rng.gen_range(1..=3);
        ("euclidean".into(), gen_euclidean(n, k, seed, dim, 10.0).expect("valid sizes"))
    }
}

fn ratio(cost: f64, base: f64) -> f64 {
    if base > 0.0 {
        cost / base
    } else if cost == 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

fn check_pd(
    ck: &mut Checks,
    inst: &MetricInstance,
    ell: usize,
    eps: f64,
    opt: f64,
    lp_value: Option<f64>,
    rep: &CentrumReport,
) {
    let bbar = rep.bbar;
    let cost = rep.solution.cost.unwrap_or(f64::NAN);
    ck.le(cost, (12.0 + 4.0 * eps) * bbar, 1e-9);
    ck.le(bbar, (1.0 + eps) * opt, 1e-9);
    // centrum cost never exceeds the truncated sum plus the budget
    for b in budget_grid(inst, eps) {
        let p = TruncatedCostParams::new(b, ell).expect("valid budget");
        let bound: f64 = rep.solution.costs.iter().map(|&c| truncated_cost(&p, c)).sum::<f64>() + b;
        ck.le(cost, bound, 1e-9);
    }
    let Some(lp) = lp_value else { return };
    match &rep.path {
        CentrumPath::ExactK { dual, .. } => {
            let p3 = TruncatedCostParams::new(3.0 * bbar, ell).expect("valid budget");
            let far: f64 = rep.solution.costs.iter().map(|&c| truncated_cost(&p3, c)).sum();
            ck.le(far, 3.0 * dual, 1e-9);
            ck.le_abs(*dual, lp, WEAK_DUALITY_ABS);
        }
        CentrumPath::Bracket(s) => {
            ck.le_abs(s.dual, lp, WEAK_DUALITY_ABS);
            ck.le(s.gap, eps * bbar, 1e-9);
            ck.le(s.combined, 3.0 * lp + 3.0 * eps * bbar, 1e-9);
        }
        CentrumPath::Colocated | CentrumPath::ZeroProxy => {}
    }
}

fn check_lp_reduce(ck: &mut Checks, inst: &MetricInstance, ell: usize, rep: &LpReduceReport) {
    let cost = rep.solution.cost.unwrap_or(f64::NAN);
    let (Some(red), Some(frac)) = (&rep.reduction, &rep.fractional) else {
        ck.eq(cost, 0.0, 0.0);
        return;
    };
    let radius = 2.0 * rep.bbar / ell as f64;
    let separated = red.centers.iter().enumerate().all(|(x, &a)| red.centers[x + 1..].iter().all(|&b| inst.d(a, b) > radius));
    ck.holds(separated);
    let consolidated: f64 = red.centers.iter().map(|&j| red.demands[j] as f64 * red.lp_cost[j]).sum();
    ck.holds(red.demands.iter().sum::<u64>() == inst.n() as u64);
    ck.le(consolidated, rep.lp_value, 1e-9);
    ck.le_abs(frac.violation, 0.0, 1e-9);
    ck.le(frac.objective, 2.0 * consolidated, 1e-9);
    ck.le(rep.mapped_cost, rep.kmedian_cost + 2.0 * rep.bbar, 1e-9);
    ck.le(cost, rep.mapped_cost, 1e-9);
}

pub fn centrum_trial(cfg: &SuiteConfig, trial: u64) -> CentrumRow {
    let mut rng = trial_rng(cfg.seed, trial);
    let eps = cfg.eps.unwrap_or(0.1);
    let n = rng.gen_range(6..=12);
    let k = rng.gen_range(2..=4);
    let ell = rng.gen_range(1..=n);
    let (kind, inst) = random_instance(&mut rng, n, k);
    let w = WeightVector::centrum(n, ell).expect("ell within range");
    let mut ck = Checks::default();
    let mut errors: Vec<String> = Vec::new();
    let mut auditor = Auditor::new(true);

    let opt = match brute_force_ordered(&inst, &w, DEFAULT_CAP) {
        Ok((s, _)) => s.cost.unwrap_or(f64::NAN),
        Err(e) => {
            errors.push(error_text(&e));
            f64::NAN
        }
    };
    let (bbar, pb) = match find_bbar_with_lp(&inst, ell, eps) {
        Ok(r) => r,
        Err(e) => {
            errors.push(error_text(&e));
            (f64::NAN, None)
        }
    };
    let lp_value = pb.as_ref().map(|p| p.value);
    if let Some(lp) = lp_value {
        ck.le(lp, bbar, 1e-9);
    }

    let opts = CentrumOptions::default();
    let pd = if bbar > 0.0 {
        solve_centrum_pd_at_with(&inst, ell, eps, bbar, opts, &mut |i, p, r| auditor.observe(i, p, r))
    } else {
        okmedian_core::centrum::solve_centrum_pd(&inst, ell, eps, opts)
    };
    let pd = match pd {
        Ok(rep) => {
            check_pd(&mut ck, &inst, ell, eps, opt, lp_value, &rep);
            Some(rep)
        }
        Err(e) => {
            ck.holds(false);
            errors.push(format!("pd: {}", error_text(&e)));
            None
        }
    };

    let lr = match kmedian_solver(&cfg.kmedian, eps) {
        None => {
            errors.push(format!("unknown k-median solver {}", cfg.kmedian));
            None
        }
        Some(solver) => {
            match solve_centrum_lp_reduce_with(&inst, ell, eps, solver.as_ref(), &mut |i, p, r| auditor.observe(i, p, r)) {
                Ok(rep) => {
                    check_lp_reduce(&mut ck, &inst, ell, &rep);
                    Some(rep)
                }
                Err(e) => {
                    ck.holds(false);
                    errors.push(format!("lp-reduce: {}", error_text(&e)));
                    None
                }
            }
        }
    };

    let tally = auditor.tally;
    let pd_cost = pd.as_ref().and_then(|r| r.solution.cost);
    let lr_cost = lr.as_ref().and_then(|r| r.solution.cost);
    CentrumRow {
        trial,
        kind,
        n,
        k,
        ell,
        opt,
        bbar,
        lp_value,
        pd_path: pd.as_ref().map_or("error", |r| match r.path {
            CentrumPath::Colocated => "colocated",
            CentrumPath::ZeroProxy => "zero-proxy",
            CentrumPath::ExactK { .. } => "exact-k",
            CentrumPath::Bracket(ref s) if s.shortcut => "bracket-shortcut",
            CentrumPath::Bracket(_) => "bracket",
        })
        .into(),
        pd_centers: pd.as_ref().map_or(String::new(), |r| crate::report::join_indices(&r.solution.centers)),
        pd_cost,
        pd_ratio_bbar: pd_cost.map(|c| ratio(c, bbar)),
        pd_ratio_opt: pd_cost.map(|c| ratio(c, opt)),
        lr_clusters: lr.as_ref().and_then(|r| r.reduction.as_ref().map(|x| x.centers.len())),
        lr_kmedian_cost: lr.as_ref().map(|r| r.kmedian_cost),
        lr_cost,
        lr_ratio_opt: lr_cost.map(|c| ratio(c, opt)),
        pd_runs: tally.runs,
        worst_certificate: (tally.runs > 0).then_some(tally.worst_certificate),
        worst_weak_duality: (tally.runs > 0).then_some(tally.worst_weak_duality),
        checks: ck.count,
        violations: ck.violations + tally.violations as u32,
        error: errors.join("; "),
    }
}

fn tally_of(runs: u64, cert: Option<f64>, dual: Option<f64>) -> AuditTally {
    AuditTally { runs, worst_certificate: cert.unwrap_or(0.0), worst_weak_duality: dual.unwrap_or(0.0), violations: 0 }
}

pub fn centrum_suite(cfg: &SuiteConfig) -> (Vec<CentrumRow>, Summary) {
    let rows = run_trials(cfg.trials, |t| centrum_trial(cfg, t));
    let mut ck = Checks::default();
    let mut audit = AuditTally::default();
    for r in &rows {
        ck.merge(&Checks { count: r.checks, violations: r.violations, worst: 0.0 });
        audit.merge(&tally_of(r.pd_runs, r.worst_certificate, r.worst_weak_duality));
    }
    let bbar_ratios: Vec<f64> = rows.iter().filter_map(|r| r.pd_ratio_bbar).collect();
    let opt_ratios: Vec<f64> = rows.iter().filter_map(|r| r.pd_ratio_opt).collect();
    let summary = Summary::new("centrum", cfg.trials, &ck, &audit)
        .with_ratio("pd_ratio_bbar", &bbar_ratios)
        .with_ratio2("pd_ratio_opt", &opt_ratios);
    (rows, summary)
}

// ---------------------------------------------------------------- ordered

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightFamily {
    Ones,
    Uniform,
    Geometric,
    Steps,
}

impl WeightFamily {
    pub const ALL: [WeightFamily; 4] = [WeightFamily::Ones, WeightFamily::Uniform, WeightFamily::Geometric, WeightFamily::Steps];

    fn name(self) -> &'static str {
        match self {
            WeightFamily::Ones => "ones",
            WeightFamily::Uniform => "uniform",
            WeightFamily::Geometric => "geometric",
            WeightFamily::Steps => "steps",
        }
    }

    /// A weight vector whose every entry is at least `eps·w₁/n`, so
    /// truncation leaves it unchanged.
    pub fn draw(self, rng: &mut ChaCha8Rng, n: usize, eps: f64) -> WeightVector {
        let floor = eps / n as f64;
        let mut w: Vec<f64> = match self {
            WeightFamily::Ones => vec![1.0; n],
            WeightFamily::Uniform => (0..n).map(|i| if i == 0 { 1.0 } else { rng.gen_range(floor..=1.0) }).collect(),
            WeightFamily::Geometric => {
                let slowest = floor.powf(1.0 / (n.max(2) - 1) as f64);
                let r = rng.gen_range(slowest..=1.0);
                (0..n).map(|i| r.powi(i as i32).max(floor)).collect()
            }
            WeightFamily::Steps => {
                let cut = rng.gen_range(1..=n);
                let low = rng.gen_range(floor..=1.0);
                (0..n).map(|i| if i < cut { 1.0 } else { low }).collect()
            }
        };
        w.sort_by(|a, b| b.total_cmp(a));
        let scale = rng.gen_range(0.5..5.0);
        WeightVector::new(w.into_iter().map(|x| x * scale).collect()).expect("sorted positive weights")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderedRow {
    pub trial: u64,
    pub family: String,
    pub n: usize,
    pub k: usize,
    pub guesses: u64,
    pub premise_guess: Option<u64>,
    pub opt: f64,
    pub cost: Option<f64>,
    pub centers: String,
    pub ratio: Option<f64>,
    /// `9·OPT* + 18εw̃₁M* + 9(1+ε)·cost(w̃; o)` at the premise-correct guess.
    pub chain_bound: Option<f64>,
    pub chain_ratio: Option<f64>,
    /// Largest `Σg(9; c) − 9·OPT − 9εw̃₁M` over guesses.
    pub worst_guess_slack: Option<f64>,
    pub pd_runs: u64,
    pub worst_certificate: Option<f64>,
    pub worst_weak_duality: Option<f64>,
    pub checks: u32,
    pub violations: u32,
    pub error: String,
}

/// Everything the ordered suite learned about one guess.
struct GuessRecord {
    candidate: Solution,
    ledger: f64,
    lp: Option<f64>,
}

pub fn ordered_trial(cfg: &SuiteConfig, trial: u64) -> OrderedRow {
    let mut rng = trial_rng(cfg.seed, trial);
    let eps = cfg.eps.unwrap_or(1.0);
    let n = rng.gen_range(5..=9);
    let k = rng.gen_range(2..=3);
    let family = WeightFamily::ALL[rng.gen_range(0..WeightFamily::ALL.len())];
    let (_, inst) = random_instance(&mut rng, n, k);
    let w = family.draw(&mut rng, n, eps);
    let mut row = OrderedRow {
        trial,
        family: family.name().into(),
        n,
        k,
        guesses: 0,
        premise_guess: None,
        opt: f64::NAN,
        cost: None,
        centers: String::new(),
        ratio: None,
        chain_bound: None,
        chain_ratio: None,
        worst_guess_slack: None,
        pd_runs: 0,
        worst_certificate: None,
        worst_weak_duality: None,
        checks: 0,
        violations: 0,
        error: String::new(),
    };
    let mut ck = Checks::default();
    let mut auditor = Auditor::new(true);
    let result = ordered_trial_body(&inst, &w, eps, &mut ck, &mut auditor, &mut row);
    if let Err(e) = result {
        ck.holds(false);
        row.error = error_text(&e);
    }
    let tally = auditor.tally;
    row.pd_runs = tally.runs;
    row.worst_certificate = (tally.runs > 0).then_some(tally.worst_certificate);
    row.worst_weak_duality = (tally.runs > 0).then_some(tally.worst_weak_duality);
    row.checks = ck.count;
    row.violations = ck.violations + tally.violations as u32;
    row
}

fn ordered_trial_body(
    inst: &MetricInstance,
    w: &WeightVector,
    eps: f64,
    ck: &mut Checks,
    auditor: &mut Auditor,
    row: &mut OrderedRow,
) -> okmedian_core::Result<()> {
    let n = inst.n();
    let (_, o) = brute_force_ordered(inst, w, DEFAULT_CAP)?;
    let opt = ordered_cost(w, &o)?;
    row.opt = opt;
    let wt = truncate_weights(w, eps);
    let w1 = wt.first();
    let guesses = collect_guesses(inst, w, eps, DEFAULT_GUESS_CAP)?;
    row.guesses = guesses.len() as u64;
    let unit = vec![1u64; n];

    let mut records = Vec::with_capacity(guesses.len());
    let mut worst_slack = f64::NEG_INFINITY;
    for sp in &guesses {
        let out = solve_fixed_guess_with(inst, sp, eps, &mut |i, p, r| auditor.observe(i, p, r))?;
        let lp = match out.path {
            GuessPath::ZeroProxy => Some(0.0),
            _ => auditor.lp_value(inst, &ProxySpec::surrogate(sp.clone(), 1.0)?, &unit),
        };
        let additive = 9.0 * eps * w1 * sp.m();
        match lp {
            Some(lp) => {
                ck.le_abs(out.ledger, 9.0 * lp + additive, WEAK_DUALITY_ABS);
                worst_slack = worst_slack.max(out.ledger - 9.0 * lp - additive);
            }
            None => {
                ck.holds(false);
            }
        }
        records.push(GuessRecord { candidate: out.solution.evaluate(w)?, ledger: out.ledger, lp });
    }
    row.worst_guess_slack = worst_slack.is_finite().then_some(worst_slack);

    let (best_id, best) = pick_best(records.iter().map(|r| r.candidate.clone()).collect())
        .ok_or(okmedian_core::Error::InvalidParameter("no guesses"))?;
    let cost = best.cost.unwrap_or(f64::NAN);
    row.cost = Some(cost);
    row.centers = crate::report::join_indices(&best.centers);
    row.ratio = Some(ratio(cost, opt));
    // the library entry point agrees with the per-guess reconstruction
    let lib = solve_ordered(inst, w, eps, OrderedOptions::default())?;
    ck.holds(lib.solution.centers == best.centers && lib.guess.as_ref().map(|g| g.0) == Some(best_id));
    for r in &records {
        ck.le(cost, r.candidate.cost.unwrap_or(f64::INFINITY), 0.0);
    }
    let cut = ordered_cost(&wt, &best.costs)?;
    ck.le(cut, cost, 1e-12);
    ck.le((1.0 - eps) * cost, cut, 1e-12);

    if o[0] <= 0.0 {
        return Ok(());
    }
    let opt_cut = ordered_cost(&wt, &o)?;
    let sp = premise_guess(&o, &wt, eps)?;
    let Some(pos) = guesses.iter().position(|g| *g == sp) else {
        ck.holds(false);
        return Ok(());
    };
    ck.holds(true);
    row.premise_guess = Some(pos as u64);
    let avg = wavg_from_opt(&o, &wt, sp.grid());
    for (e, a) in sp.w_est().iter().zip(&avg) {
        ck.le(*a, *e, 1e-9);
        ck.le(*e, (1.0 + eps) * a, 1e-9);
    }
    let m = sp.m();
    let g1: f64 = o.iter().map(|&d| surrogate_cost(&sp, 1.0, d)).sum();
    ck.le(g1, (1.0 + eps).powi(2) * opt_cut, 1e-9);

    let rec = &records[pos];
    let Some(lp) = rec.lp else { return Ok(()) };
    ck.le_abs(lp, g1, WEAK_DUALITY_ABS);
    let c_star = &rec.candidate;
    let star_cut = ordered_cost(&wt, &c_star.costs)?;
    for gamma in [1.0, 3.0, 9.0] {
        let g: f64 = c_star.costs.iter().map(|&d| surrogate_cost(&sp, gamma, d)).sum();
        ck.le(star_cut, g + gamma * (1.0 + eps) * opt_cut + gamma * eps * w1 * m, 1e-9);
    }
    ck.le(star_cut, rec.ledger + 9.0 * (1.0 + eps) * opt_cut + 9.0 * eps * w1 * m, 1e-9);
    let chain = 9.0 * lp + 18.0 * eps * w1 * m + 9.0 * (1.0 + eps) * opt_cut;
    row.chain_bound = Some(chain);
    row.chain_ratio = Some(ratio(chain, opt));
    ck.le(star_cut, chain + 1e-7, 1e-9);
    ck.le(cost, c_star.cost.unwrap_or(f64::INFINITY), 0.0);
    if wt == *w {
        ck.le(cost, chain + 1e-7, 1e-9);
    }
    Ok(())
}

pub fn ordered_suite(cfg: &SuiteConfig) -> (Vec<OrderedRow>, Summary) {
    let rows = run_trials(cfg.trials, |t| ordered_trial(cfg, t));
    let mut ck = Checks::default();
    let mut audit = AuditTally::default();
    for r in &rows {
        ck.merge(&Checks { count: r.checks, violations: r.violations, worst: 0.0 });
        audit.merge(&tally_of(r.pd_runs, r.worst_certificate, r.worst_weak_duality));
    }
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let chain: Vec<f64> = rows.iter().filter_map(|r| r.chain_ratio).collect();
    let summary = Summary::new("ordered", cfg.trials, &ck, &audit)
        .with_ratio("ratio", &ratios)
        .with_ratio2("chain_ratio", &chain);
    (rows, summary)
}

// ---------------------------------------------------------------- lpcheck

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpRow {
    pub trial: u64,
    pub kind: String,
    pub rows: usize,
    pub cols: usize,
    pub status: String,
    pub value: Option<f64>,
    pub dual_value: Option<f64>,
    pub integer_opt: Option<f64>,
    pub primal_violation: Option<f64>,
    pub checks: u32,
    pub violations: u32,
}

fn random_dense_lp(rng: &mut ChaCha8Rng) -> DenseLP {
    let nv = rng.gen_range(2..=8);
    let m = rng.gen_range(1..=6);
    let x0: Vec<f64> = (0..nv).map(|_| rng.gen_range(0.0..1.0)).collect();
    let obj: Vec<f64> = (0..nv).map(|_| rng.gen_range(-5i32..=5) as f64).collect();
    let mut lp = DenseLP::new(obj);
    for v in 0..nv {
        let hi = rng.gen_range(1..=3) as f64;
        lp.set_bounds(v, 0.0, hi);
    }
    for _ in 0..m {
        let row: Vec<f64> = (0..nv).map(|_| rng.gen_range(-3i32..=3) as f64).collect();
        let at: f64 = row.iter().zip(&x0).map(|(a, x)| a * x).sum();
        let (sense, rhs) = match rng.gen_range(0..3) {
            0 => (Sense::Le, at + rng.gen_range(0.0..1.0)),
            1 => (Sense::Ge, at - rng.gen_range(0.0..1.0)),
            _ => (Sense::Eq, at),
        };
        lp.add_row(row, sense, rhs);
    }
    lp
}

pub fn lpcheck_trial(cfg: &SuiteConfig, trial: u64) -> LpRow {
    let mut rng = trial_rng(cfg.seed, trial);
    let mut ck = Checks::default();
    let choice = rng.gen_range(0..4);
    let mut integer_opt = None;
    let (kind, lp) = if choice == 3 {
        ("dense".to_string(), random_dense_lp(&mut rng))
    } else {
        let n = rng.gen_range(3..=8);
        let k = rng.gen_range(1..n);
        let (_, inst) = random_instance(&mut rng, n, k);
        let demands: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        let (name, proxy) = match choice {
            0 => ("facility-identity", ProxySpec::Identity),
            1 => {
                let b = rng.gen_range(0.0..(n as f64 * inst.max_distance()));
                let ell = rng.gen_range(1..=n);
                ("facility-truncated", ProxySpec::Truncated(TruncatedCostParams::new(b, ell).expect("valid")))
            }
            _ => {
                let dists = inst.distinct_positive_distances();
                let m = *dists.choose(&mut rng).expect("positive distances");
                let eps = 1.0 - rng.gen_range(0.0..0.9);
                let grid = IntervalGrid::new(m, eps, n).expect("valid grid");
                let levels = weight_levels(1.0, eps, n);
                let mut w_est: Vec<f64> = (0..=grid.t()).map(|_| *levels.choose(&mut rng).expect("levels")).collect();
                w_est.sort_by(|a, b| b.total_cmp(a));
                let sp = SurrogateParams::from_grid(grid, 1.0, w_est).expect("valid surrogate");
                ("facility-surrogate", ProxySpec::surrogate(sp, 1.0).expect("gamma is 1"))
            }
        };
        integer_opt = brute_force_proxy_sum(&inst, &proxy, &demands, DEFAULT_CAP).ok().map(|r| r.1);
        (name.to_string(), build_pb_lp(&inst, &proxy, &demands).expect("lengths match"))
    };
    let sol = solve_lp(&lp);
    let mut row = LpRow {
        trial,
        kind,
        rows: lp.num_rows(),
        cols: lp.num_vars(),
        status: String::new(),
        value: None,
        dual_value: None,
        integer_opt,
        primal_violation: None,
        checks: 0,
        violations: 0,
    };
    match sol {
        Ok(sol) => {
            row.status = format!("{:?}", sol.status).to_lowercase();
            if ck.holds(sol.status == LpStatus::Optimal) {
                let v = sol.value;
                let viol = lp.max_violation(&sol.x);
                ck.le_abs(viol, 0.0, 1e-7);
                ck.eq(lp.objective_value(&sol.x), v, 1e-7);
                ck.eq(sol.dual_value, v, 1e-7);
                ck.eq(lagrangian_dual_value(&lp, &sol.dual), v, 1e-7);
                let signs = lp.senses.iter().zip(&sol.dual).all(|(s, &y)| match s {
                    Sense::Ge => y >= -1e-7,
                    Sense::Le => y <= 1e-7,
                    Sense::Eq => true,
                });
                ck.holds(signs);
                if let Some(int) = integer_opt {
                    ck.le(v, int, 1e-7);
                }
                row.value = Some(v);
                row.dual_value = Some(sol.dual_value);
                row.primal_violation = Some(viol);
            }
        }
        Err(e) => {
            row.status = format!("error: {}", error_text(&e));
            ck.holds(false);
        }
    }
    row.checks = ck.count;
    row.violations = ck.violations;
    row
}

pub fn lpcheck_suite(cfg: &SuiteConfig) -> (Vec<LpRow>, Summary) {
    let rows = run_trials(cfg.trials, |t| lpcheck_trial(cfg, t));
    let mut ck = Checks::default();
    for r in &rows {
        ck.merge(&Checks { count: r.checks, violations: r.violations, worst: 0.0 });
    }
    let gaps: Vec<f64> = rows
        .iter()
        .filter_map(|r| Some(((r.value? - r.dual_value?).abs()) / (1.0 + r.value?.abs())))
        .collect();
    let summary = Summary::new("lpcheck", cfg.trials, &ck, &AuditTally::default()).with_ratio("duality_gap", &gaps);
    (rows, summary)
}

/// Run a suite and write its report; returns the summary.
pub fn run_suite<W: std::io::Write>(suite: Suite, cfg: &SuiteConfig, format: Format, out: W) -> CliResult<(Summary, W)> {
    let mut w = ReportWriter::new(format, out);
    let summary = match suite {
        Suite::Claims => write_rows(&mut w, claims_suite(cfg))?,
        Suite::Centrum => write_rows(&mut w, centrum_suite(cfg))?,
        Suite::Ordered => write_rows(&mut w, ordered_suite(cfg))?,
        Suite::Lpcheck => write_rows(&mut w, lpcheck_suite(cfg))?,
    };
    w.summary(&summary)?;
    Ok((summary, w.finish()?))
}

fn write_rows<W: std::io::Write, R: Serialize>(w: &mut ReportWriter<W>, (rows, summary): (Vec<R>, Summary)) -> CliResult<Summary> {
    for r in &rows {
        w.row("trial", r)?;
    }
    Ok(summary)
}
