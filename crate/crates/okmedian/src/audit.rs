//! Absolute-tolerance audit of dual ascent runs.
//!
//! The core pipelines already reject runs whose certificates fail at their
//! internal relative tolerance. The auditor rechecks every run it is shown
//! with absolute slack and compares the run's dual value against the exact LP
//! optimum for the same proxy and demands.

use okmedian_core::lp::lp_opt_value;
use okmedian_core::primal_dual::{audit_run, PdResult};
use okmedian_core::{MetricInstance, ProxySpec};
use serde::Serialize;

/// Slack on feasibility, tightness and the LMP inequality.
pub const CERT_ABS: f64 = 1e-9;
/// Slack on `Σ d_j α_j − kλ ≤ LP optimum`.
pub const WEAK_DUALITY_ABS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct AuditTally {
    pub runs: u64,
    /// Largest certificate violation seen (negative: all held with room).
    pub worst_certificate: f64,
    /// Largest `dual − LP` seen.
    pub worst_weak_duality: f64,
    pub violations: u64,
}

impl AuditTally {
    pub fn merge(&mut self, other: &AuditTally) {
        if other.runs == 0 {
            return;
        }
        if self.runs == 0 {
            *self = *other;
            return;
        }
        self.runs += other.runs;
        self.worst_certificate = self.worst_certificate.max(other.worst_certificate);
        self.worst_weak_duality = self.worst_weak_duality.max(other.worst_weak_duality);
        self.violations += other.violations;
    }
}

struct CachedLp {
    matrix: Vec<f64>,
    k: usize,
    proxy: ProxySpec,
    demands: Vec<u64>,
    value: Option<f64>,
}

/// Stateful observer; caches the LP optimum of the last proxy it saw, since
/// one Lagrangian search probes many prices on the same LP.
pub struct Auditor {
    pub tally: AuditTally,
    weak_duality: bool,
    cache: Option<CachedLp>,
}

impl Auditor {
    pub fn new(weak_duality: bool) -> Self {
        Auditor { tally: AuditTally::default(), weak_duality, cache: None }
    }

    /// Exact LP optimum, `None` if the solver did not reach optimality.
    pub fn lp_value(&mut self, inst: &MetricInstance, proxy: &ProxySpec, demands: &[u64]) -> Option<f64> {
        let hit = self.cache.as_ref().is_some_and(|c| {
            c.k == inst.k() && c.proxy == *proxy && c.demands == demands && c.matrix == inst.matrix()
        });
        if !hit {
            self.cache = Some(CachedLp {
                matrix: inst.matrix().to_vec(),
                k: inst.k(),
                proxy: proxy.clone(),
                demands: demands.to_vec(),
                value: lp_opt_value(inst, proxy, demands).ok(),
            });
        }
        self.cache.as_ref().and_then(|c| c.value)
    }

    pub fn observe(&mut self, inst: &MetricInstance, proxy: &ProxySpec, res: &PdResult) {
        let cert = audit_run(inst, res, &proxy.dilate(3.0)).worst();
        let first = self.tally.runs == 0;
        self.tally.runs += 1;
        let mut bad = !(cert <= CERT_ABS);
        self.tally.worst_certificate = if first { cert } else { self.tally.worst_certificate.max(cert) };
        if self.weak_duality {
            let gap = match self.lp_value(inst, proxy, &res.demands) {
                Some(lp) => res.dual_objective(inst.k()) - lp,
                None => f64::INFINITY,
            };
            bad |= !(gap <= WEAK_DUALITY_ABS);
            self.tally.worst_weak_duality = if first { gap } else { self.tally.worst_weak_duality.max(gap) };
        }
        if bad {
            self.tally.violations += 1;
        }
    }
}
