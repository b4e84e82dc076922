//! Pipeline dispatch for `solve`, with guess-level and budget-level
//! parallelism and a deterministic merge.

use std::time::Instant;

use okmedian_core::centrum::{
    better, budget_grid, find_bbar, kmedian_solver, solve_centrum_lp_reduce_with, solve_centrum_pd_at_with,
    CentrumOptions, CentrumReport,
};
use okmedian_core::oracle::{brute_force_ordered, DEFAULT_CAP};
use okmedian_core::ordered::{collect_guesses, pick_best, score_guess_with, trivial_ordered, DEFAULT_GUESS_CAP};
use okmedian_core::{MetricInstance, Solution, WeightVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::audit::{AuditTally, Auditor};
use crate::error::{CliError, CliResult};
use crate::report::join_indices;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Algorithm {
    /// Primal-dual ℓ-centrum pipeline.
    Pd,
    /// LP reduction to weighted k-median.
    LpReduce,
    /// General weights via surrogate guesses.
    General,
    /// `pd` for 0/1 weights, `general` otherwise.
    Auto,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Pd => "pd",
            Algorithm::LpReduce => "lp-reduce",
            Algorithm::General => "general",
            Algorithm::Auto => "auto",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub algorithm: Algorithm,
    pub eps: f64,
    pub scan_b: bool,
    pub oracle_check: bool,
    /// k-median routine for `lp-reduce`.
    pub kmedian: String,
    pub guess_cap: u128,
    pub oracle_cap: u128,
    pub record_elapsed: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            algorithm: Algorithm::Auto,
            eps: 0.1,
            scan_b: false,
            oracle_check: false,
            kmedian: "lagrangian".into(),
            guess_cap: DEFAULT_GUESS_CAP,
            oracle_cap: DEFAULT_CAP,
            record_elapsed: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveRecord {
    pub algorithm: String,
    pub eps: f64,
    pub bbar: Option<f64>,
    /// Index of the winning guess in enumeration order.
    pub guess: Option<u64>,
    pub guess_m: Option<f64>,
    pub centers: String,
    pub cost: f64,
    pub opt: Option<f64>,
    pub ratio: Option<f64>,
    pub pd_runs: u64,
    pub audit_worst: Option<f64>,
    pub elapsed_ms: Option<f64>,
}

/// What a pipeline produced, before the oracle columns are filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub algorithm: Algorithm,
    pub solution: Solution,
    pub bbar: Option<f64>,
    pub guess: Option<(u64, f64)>,
    pub audit: AuditTally,
}

fn resolve(algorithm: Algorithm, w: &WeightVector) -> Algorithm {
    match algorithm {
        Algorithm::Auto if w.centrum_size().is_some() => Algorithm::Pd,
        Algorithm::Auto => Algorithm::General,
        other => other,
    }
}

fn centrum_size(w: &WeightVector, algorithm: Algorithm) -> CliResult<usize> {
    w.centrum_size().ok_or_else(|| {
        CliError::Usage(format!("algorithm `{}` needs 0/1 weights (a centrum vector)", algorithm.name()))
    })
}

/// Primal-dual pipeline; with `scan_b` every grid budget runs in parallel and
/// the best solution wins.
pub fn run_pd(inst: &MetricInstance, ell: usize, eps: f64, scan_b: bool, weak_duality: bool) -> CliResult<(CentrumReport, AuditTally)> {
    let opts = CentrumOptions { improved: true, scan_b: false };
    if inst.distinct_points().len() <= inst.k() {
        let rep = okmedian_core::centrum::solve_centrum_pd(inst, ell, eps, opts)?;
        return Ok((rep, AuditTally::default()));
    }
    let budgets = if scan_b { budget_grid(inst, eps) } else { vec![find_bbar(inst, ell, eps)?] };
    let results: Vec<CliResult<(CentrumReport, AuditTally)>> = budgets
        .par_iter()
        .map(|&b| {
            let mut auditor = Auditor::new(weak_duality);
            let rep = solve_centrum_pd_at_with(inst, ell, eps, b, opts, &mut |i, p, r| auditor.observe(i, p, r))?;
            Ok((rep, auditor.tally))
        })
        .collect();
    let mut best: Option<(CentrumReport, AuditTally)> = None;
    let mut tally = AuditTally::default();
    for r in results {
        let (rep, t) = r?;
        tally.merge(&t);
        if best.as_ref().map_or(true, |(cur, _)| better(&rep.solution, &cur.solution)) {
            best = Some((rep, t));
        }
    }
    let (rep, _) = best.ok_or_else(|| CliError::Usage("empty budget grid".into()))?;
    Ok((rep, tally))
}

/// General-weight pipeline with guesses scored in parallel.
pub fn run_general(
    inst: &MetricInstance,
    w: &WeightVector,
    eps: f64,
    guess_cap: u128,
    weak_duality: bool,
) -> CliResult<(Solution, Option<(u64, f64)>, AuditTally)> {
    if let Some(rep) = trivial_ordered(inst, w, eps)? {
        return Ok((rep.solution, None, AuditTally::default()));
    }
    let guesses = collect_guesses(inst, w, eps, guess_cap)?;
    let scored: Vec<CliResult<(Solution, AuditTally)>> = guesses
        .par_iter()
        .map(|sp| {
            let mut auditor = Auditor::new(weak_duality);
            let sol = score_guess_with(inst, w, sp, eps, &mut |i, p, r| auditor.observe(i, p, r))?;
            Ok((sol, auditor.tally))
        })
        .collect();
    let mut tally = AuditTally::default();
    let mut candidates = Vec::with_capacity(scored.len());
    for s in scored {
        let (sol, t) = s?;
        tally.merge(&t);
        candidates.push(sol);
    }
    let (id, solution) = pick_best(candidates).ok_or_else(|| CliError::Usage("no guesses".into()))?;
    Ok((solution, Some((id as u64, guesses[id].m())), tally))
}

pub fn run(inst: &MetricInstance, w: &WeightVector, opts: &SolveOptions) -> CliResult<Outcome> {
    let algorithm = resolve(opts.algorithm, w);
    let audit_lp = opts.oracle_check;
    let outcome = match algorithm {
        Algorithm::Pd => {
            let ell = centrum_size(w, algorithm)?;
            let (rep, audit) = run_pd(inst, ell, opts.eps, opts.scan_b, audit_lp)?;
            Outcome { algorithm, solution: rep.solution, bbar: Some(rep.bbar), guess: None, audit }
        }
        Algorithm::LpReduce => {
            let ell = centrum_size(w, algorithm)?;
            let solver = kmedian_solver(&opts.kmedian, opts.eps)
                .ok_or_else(|| CliError::Usage(format!("unknown k-median solver `{}`", opts.kmedian)))?;
            let mut auditor = Auditor::new(audit_lp);
            let rep = solve_centrum_lp_reduce_with(inst, ell, opts.eps, solver.as_ref(), &mut |i, p, r| {
                auditor.observe(i, p, r)
            })?;
            let audit = auditor.tally;
            Outcome { algorithm, solution: rep.solution, bbar: Some(rep.bbar), guess: None, audit }
        }
        Algorithm::General => {
            let (solution, guess, audit) = run_general(inst, w, opts.eps, opts.guess_cap, audit_lp)?;
            Outcome { algorithm, solution, bbar: None, guess, audit }
        }
        Algorithm::Auto => unreachable!("resolved above"),
    };
    Ok(outcome)
}

/// Run the selected pipeline and build its report record.
pub fn solve(inst: &MetricInstance, w: &WeightVector, opts: &SolveOptions) -> CliResult<SolveRecord> {
    if !(opts.eps > 0.0 && opts.eps <= 1.0) {
        return Err(CliError::Usage("--epsilon must lie in (0, 1]".into()));
    }
    let start = Instant::now();
    let out = run(inst, w, opts)?;
    let cost = out.solution.objective(w)?;
    let (mut opt, mut ratio, mut audit_worst) = (None, None, None);
    if opts.oracle_check {
        let o = brute_force_ordered(inst, w, opts.oracle_cap)?.0.cost.unwrap_or(0.0);
        opt = Some(o);
        ratio = Some(if o > 0.0 { cost / o } else if cost == 0.0 { 1.0 } else { f64::INFINITY });
        if out.audit.runs > 0 {
            audit_worst = Some(out.audit.worst_certificate.max(out.audit.worst_weak_duality));
        }
        if out.audit.violations > 0 {
            return Err(CliError::Violation(format!(
                "{} of {} dual ascent runs failed the absolute audit",
                out.audit.violations, out.audit.runs
            )));
        }
        if let (Algorithm::Pd, Some(b)) = (out.algorithm, out.bbar) {
            let cap = (12.0 + 4.0 * opts.eps) * b;
            if cost > cap * (1.0 + 1e-9) {
                return Err(CliError::Violation(format!("cost {cost} exceeds (12+4eps)*B = {cap}")));
            }
            if b > (1.0 + opts.eps) * o * (1.0 + 1e-9) {
                return Err(CliError::Violation(format!("budget {b} exceeds (1+eps)*opt = {}", (1.0 + opts.eps) * o)));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    Ok(SolveRecord {
        algorithm: out.algorithm.name().into(),
        eps: opts.eps,
        bbar: out.bbar,
        guess: out.guess.map(|g| g.0),
        guess_m: out.guess.map(|g| g.1),
        centers: join_indices(&out.solution.centers),
        cost,
        opt,
        ratio,
        pd_runs: out.audit.runs,
        audit_worst,
        elapsed_ms: opts.record_elapsed.then_some(elapsed),
    })
}
