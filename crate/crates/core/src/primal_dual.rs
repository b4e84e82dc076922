//! Lagrangian dual ascent with pruning, its LMP certificate, and the search
//! over the facility price `λ`.
//!
//! Every point is a candidate facility with opening price `λ`. Client duals
//! `α_j` rise uniformly from zero; client `j` contributes
//! `β_ij = max(0, min(α_j, t_open(i)) − p_ij)` per unit of demand to facility
//! `i`, where `p_ij` is the proxy service cost. A facility opens once its
//! contributions reach `λ`, and a client freezes as soon as it reaches an open
//! facility. The run is simulated event by event in closed form.

use alloc::vec;
use alloc::vec::Vec;

use crate::instance::{nearest_assignment, MetricInstance, Solution};
use crate::ordered_cost::ProxySpec;
use crate::tol;
use crate::{Error, Result};

/// Outcome of one dual ascent run at a fixed price.
#[derive(Debug, Clone, PartialEq)]
pub struct PdResult {
    pub lambda: f64,
    /// Opened facilities in opening order.
    pub opened: Vec<usize>,
    /// Opening time per point, `+∞` for points that never opened.
    pub t_open: Vec<f64>,
    /// The pruned center set `T`, ascending.
    pub centers: Vec<usize>,
    /// Nearest center of `T` for each client (ties to the smallest index).
    pub assign: Vec<usize>,
    /// Freeze times, equal to the final client duals.
    pub alpha: Vec<f64>,
    /// Clients with a positive contribution to some center in `T`.
    pub in_s: Vec<bool>,
    pub demands: Vec<u64>,
    /// Row-major proxy costs `p_ij` the run used.
    pub proxy_costs: Vec<f64>,
    /// Contributions at or below this value count as zero.
    pub beta_floor: f64,
}

impl PdResult {
    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    #[inline]
    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.proxy_costs[i * self.n() + j]
    }

    #[inline]
    pub fn beta(&self, i: usize, j: usize) -> f64 {
        (self.alpha[j].min(self.t_open[i]) - self.p(i, j)).max(0.0)
    }

    pub fn contributes(&self, i: usize, j: usize) -> bool {
        self.beta(i, j) > self.beta_floor
    }

    pub fn num_centers(&self) -> usize {
        self.centers.len()
    }

    /// `Σ_j demand_j α_j − k λ`.
    pub fn dual_objective(&self, k: usize) -> f64 {
        self.weighted_alpha_sum() - k as f64 * self.lambda
    }

    pub fn weighted_alpha_sum(&self) -> f64 {
        self.alpha.iter().zip(&self.demands).map(|(a, &d)| a * d as f64).sum()
    }

    /// `T` as a nearest-assigned solution under real distances.
    pub fn solution(&self, inst: &MetricInstance) -> Result<Solution> {
        nearest_assignment(inst, &self.centers)
    }
}

/// Row-major `proxy(d(i, j))`.
pub fn proxy_matrix(inst: &MetricInstance, proxy: &ProxySpec) -> Vec<f64> {
    proxy.matrix(inst)
}

fn check_demands(n: usize, demands: &[u64]) -> Result<()> {
    if demands.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: demands.len() });
    }
    if demands.contains(&0) {
        return Err(Error::InvalidParameter("demands must be positive"));
    }
    Ok(())
}

pub fn dual_ascent(inst: &MetricInstance, proxy: &ProxySpec, lambda: f64, demands: &[u64]) -> Result<PdResult> {
    dual_ascent_costs(inst, proxy_matrix(inst, proxy), lambda, demands)
}

/// [`dual_ascent`] on a precomputed proxy matrix.
pub fn dual_ascent_costs(inst: &MetricInstance, p: Vec<f64>, lambda: f64, demands: &[u64]) -> Result<PdResult> {
    let n = inst.n();
    check_demands(n, demands)?;
    if p.len() != n * n {
        return Err(Error::LengthMismatch { expected: n * n, found: p.len() });
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter("lambda must be finite and nonnegative"));
    }
    let dem: Vec<f64> = demands.iter().map(|&d| d as f64).collect();
    let mut alpha = vec![0.0; n];
    let mut active = vec![true; n];
    let mut n_active = n;
    let mut t_open = vec![f64::INFINITY; n];
    let mut opened: Vec<usize> = Vec::new();
    let mut tight_at = vec![f64::INFINITY; n];
    let mut t = 0.0f64;

    while n_active > 0 {
        let mut next = f64::INFINITY;
        for i in 0..n {
            tight_at[i] = f64::INFINITY;
            if t_open[i].is_finite() {
                continue;
            }
            let row = &p[i * n..(i + 1) * n];
            let (mut s, mut rate) = (0.0, 0.0);
            for j in 0..n {
                let a = if active[j] { t } else { alpha[j] };
                if a > row[j] {
                    s += dem[j] * (a - row[j]);
                }
                if active[j] && row[j] <= t {
                    rate += dem[j];
                }
            }
            if s >= lambda {
                tight_at[i] = t;
            } else if rate > 0.0 {
                tight_at[i] = t + (lambda - s) / rate;
            }
            next = next.min(tight_at[i]);
        }
        for j in (0..n).filter(|&j| active[j]) {
            for i in 0..n {
                let pij = p[i * n + j];
                if pij > t && pij < next {
                    next = pij;
                }
            }
        }
        debug_assert!(next.is_finite(), "dual ascent stalled with active clients");
        if !next.is_finite() {
            return Err(Error::InvalidParameter("dual ascent has no next event"));
        }
        t = next;
        let tie = 1e-12 * t.max(1.0);
        // facility tightness first, by index
        for i in 0..n {
            if tight_at[i] <= t + tie {
                t_open[i] = t;
                opened.push(i);
                for j in 0..n {
                    if active[j] && p[i * n + j] <= t {
                        active[j] = false;
                        alpha[j] = t;
                        n_active -= 1;
                    }
                }
            }
        }
        // then clients reaching an already open facility
        for j in 0..n {
            if active[j] && opened.iter().any(|&i| p[i * n + j] <= t) {
                active[j] = false;
                alpha[j] = t;
                n_active -= 1;
            }
        }
    }

    let max_alpha = alpha.iter().copied().fold(0.0, f64::max);
    let beta_floor = tol::BETA_REL * max_alpha.max(1.0);
    let beta = |i: usize, j: usize| (alpha[j].min(t_open[i]) - p[i * n + j]).max(0.0);
    let mut centers: Vec<usize> = Vec::new();
    for &i in &opened {
        let conflict = centers
            .iter()
            .any(|&c| (0..n).any(|j| beta(i, j) > beta_floor && beta(c, j) > beta_floor));
        if !conflict {
            centers.push(i);
        }
    }
    centers.sort_unstable();
    let in_s = (0..n).map(|j| centers.iter().any(|&i| beta(i, j) > beta_floor)).collect();
    let assign = nearest_assignment(inst, &centers)?.assign;
    Ok(PdResult {
        lambda,
        opened,
        t_open,
        centers,
        assign,
        alpha,
        in_s,
        demands: demands.to_vec(),
        proxy_costs: p,
        beta_floor,
    })
}

/// Dual feasibility and the facility budget:
/// `α_j ≤ p_ij + β_ij` for all pairs, `Σ_j demand_j β_ij ≤ λ` for all `i`,
/// with equality for opened facilities.
pub fn check_dual_feasibility(res: &PdResult) -> Result<()> {
    let n = res.n();
    let slack = tol::CERT * (1.0 + res.lambda);
    for i in 0..n {
        let mut paid = 0.0;
        for j in 0..n {
            let beta = res.beta(i, j);
            let lhs = res.alpha[j];
            let rhs = res.p(i, j) + beta;
            if lhs > rhs + tol::CERT * (1.0 + rhs) {
                return Err(Error::Certificate { what: "alpha_j <= p_ij + beta_ij", lhs, rhs });
            }
            paid += res.demands[j] as f64 * beta;
        }
        if paid > res.lambda + slack {
            return Err(Error::Certificate { what: "facility budget", lhs: paid, rhs: res.lambda });
        }
        if res.t_open[i].is_finite() && paid < res.lambda - slack {
            return Err(Error::Certificate { what: "opened facility is tight", lhs: paid, rhs: res.lambda });
        }
    }
    Ok(())
}

/// Each client contributes to at most one center of `T`, and no opened
/// facility outside `T` could be added without breaking that.
pub fn check_pruning(res: &PdResult) -> Result<()> {
    let n = res.n();
    for j in 0..n {
        let count = res.centers.iter().filter(|&&i| res.contributes(i, j)).count();
        if count > 1 {
            return Err(Error::Certificate { what: "one contributor per client", lhs: count as f64, rhs: 1.0 });
        }
    }
    for &i in res.opened.iter().filter(|i| !res.centers.contains(i)) {
        let blocked = res.centers.iter().any(|&c| (0..n).any(|j| res.contributes(i, j) && res.contributes(c, j)));
        if !blocked {
            return Err(Error::Certificate { what: "pruned set is maximal", lhs: i as f64, rhs: 0.0 });
        }
    }
    if res.centers.is_empty() {
        return Err(Error::EmptyCenters);
    }
    Ok(())
}

/// Both sides of the LMP inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateReport {
    /// `3λ|T| + Σ_{j∈S} d_j p(c_{i(j)j}) + Σ_{j∉S} d_j p3(c_{i(j)j})`.
    pub lhs: f64,
    /// `3λ|T| + Σ_j d_j p3(c_{i(j)j})`, never larger than `lhs`.
    pub lhs_aggregate: f64,
    /// `3 Σ_j d_j α_j`.
    pub rhs: f64,
}

impl CertificateReport {
    pub fn violation(&self) -> f64 {
        self.lhs - self.rhs
    }
}

/// Evaluate the LMP inequality with `proxy3` the dilated companion of the
/// proxy the run used, failing if it is violated.
pub fn certificate_check(inst: &MetricInstance, res: &PdResult, proxy3: &ProxySpec) -> Result<CertificateReport> {
    let rep = certificate_sides(inst, res, proxy3);
    if rep.lhs > rep.rhs + tol::CERT * (1.0 + rep.rhs) {
        return Err(Error::Certificate { what: "LMP inequality", lhs: rep.lhs, rhs: rep.rhs });
    }
    Ok(rep)
}

/// [`certificate_check`] without the verdict.
pub fn certificate_sides(inst: &MetricInstance, res: &PdResult, proxy3: &ProxySpec) -> CertificateReport {
    let base = 3.0 * res.lambda * res.num_centers() as f64;
    let (mut split, mut agg) = (base, base);
    for j in 0..res.n() {
        let i = res.assign[j];
        let d = res.demands[j] as f64;
        let far = proxy3.eval(inst.d(i, j));
        agg += d * far;
        split += d * if res.in_s[j] { res.p(i, j) } else { far };
    }
    CertificateReport { lhs: split, lhs_aggregate: agg, rhs: 3.0 * res.weighted_alpha_sum() }
}

/// Callback that sees every certified dual ascent run, with the instance and
/// proxy it ran on.
pub type RunObserver<'a> = dyn FnMut(&MetricInstance, &ProxySpec, &PdResult) + 'a;

/// Absolute violations of one run's certificates; zero or negative means
/// the inequality holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunAudit {
    /// Largest `α_j − p_ij − β_ij` and `Σ_j d_j β_ij − λ`.
    pub feasibility: f64,
    /// Largest `|Σ_j d_j β_ij − λ|` over opened facilities.
    pub tightness: f64,
    /// LMP left side minus right side.
    pub lmp: f64,
}

impl RunAudit {
    pub fn worst(&self) -> f64 {
        self.feasibility.max(self.tightness).max(self.lmp)
    }
}

pub fn audit_run(inst: &MetricInstance, res: &PdResult, proxy3: &ProxySpec) -> RunAudit {
    let n = res.n();
    let (mut feasibility, mut tightness) = (f64::NEG_INFINITY, 0.0f64);
    for i in 0..n {
        let mut paid = 0.0;
        for j in 0..n {
            let beta = res.beta(i, j);
            feasibility = feasibility.max(res.alpha[j] - res.p(i, j) - beta);
            paid += res.demands[j] as f64 * beta;
        }
        feasibility = feasibility.max(paid - res.lambda);
        if res.t_open[i].is_finite() {
            tightness = tightness.max((paid - res.lambda).abs());
        }
    }
    let sides = certificate_sides(inst, res, proxy3);
    RunAudit { feasibility, tightness, lmp: sides.lhs.max(sides.lhs_aggregate) - sides.rhs }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LambdaOutcome {
    ExactK(PdResult),
    /// `(lo, hi)` with `|T(lo)| > k > |T(hi)|` and `hi.lambda − lo.lambda < tol`.
    Bracket(PdResult, PdResult),
}

pub fn lambda_search(inst: &MetricInstance, proxy: &ProxySpec, demands: &[u64], tol: f64) -> Result<LambdaOutcome> {
    lambda_search_with(inst, proxy, demands, tol, &mut |_| Ok(()))
}

/// [`lambda_search`] calling `observe` on every probe; an error from
/// `observe` aborts the search.
pub fn lambda_search_with(
    inst: &MetricInstance,
    proxy: &ProxySpec,
    demands: &[u64],
    tol: f64,
    observe: &mut dyn FnMut(&PdResult) -> Result<()>,
) -> Result<LambdaOutcome> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter("lambda tolerance must be positive"));
    }
    check_demands(inst.n(), demands)?;
    let p = proxy_matrix(inst, proxy);
    if p.iter().all(|&c| c == 0.0) {
        return Err(Error::ZeroProxy);
    }
    let k = inst.k();
    let mut probe = |lambda: f64| -> Result<PdResult> {
        let res = dual_ascent_costs(inst, p.clone(), lambda, demands)?;
        observe(&res)?;
        Ok(res)
    };
    let mut lo = probe(0.0)?;
    if lo.num_centers() == k {
        return Ok(LambdaOutcome::ExactK(lo));
    }
    let cap = libm::ldexp(1.0, 64);
    let mut lambda = 1.0;
    let mut hi = loop {
        let res = probe(lambda)?;
        match res.num_centers() {
            c if c == k => return Ok(LambdaOutcome::ExactK(res)),
            c if c < k => break res,
            _ => {
                lo = res;
                lambda *= 2.0;
                if lambda > cap {
                    return Err(Error::LambdaCap);
                }
            }
        }
    };
    while hi.lambda - lo.lambda >= tol {
        let mid = 0.5 * (lo.lambda + hi.lambda);
        if !(mid > lo.lambda && mid < hi.lambda) {
            return Err(Error::BisectionStalled { lo: lo.lambda, hi: hi.lambda });
        }
        let res = probe(mid)?;
        match res.num_centers() {
            c if c == k => return Ok(LambdaOutcome::ExactK(res)),
            c if c > k => lo = res,
            _ => hi = res,
        }
    }
    Ok(LambdaOutcome::Bracket(lo, hi))
}
