//! Dense two-phase simplex and the facility-location LPs built on it.
//!
//! Problems are small (at most a few hundred variables), so the solver keeps
//! a full tableau, uses Bland's rule throughout and reports row duals read off
//! the final reduced costs. Every optimal answer is re-verified (primal
//! feasibility and primal = dual value) before it is returned; numerical
//! trouble surfaces as [`LpStatus::Numerical`] rather than a wrong optimum.

use alloc::vec;
use alloc::vec::Vec;

use crate::instance::MetricInstance;
use crate::ordered_cost::ProxySpec;
use crate::tol;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    /// The final basis failed re-verification.
    Numerical,
}

/// `min c·x` subject to dense rows and per-variable bounds `lo ≤ x ≤ hi`.
///
/// Lower bounds must be finite; upper bounds may be `+∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseLP {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub senses: Vec<Sense>,
    pub rhs: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl DenseLP {
    /// No rows; every variable in `[0, ∞)`.
    pub fn new(objective: Vec<f64>) -> Self {
        let nv = objective.len();
        DenseLP {
            objective,
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            lo: vec![0.0; nv],
            hi: vec![f64::INFINITY; nv],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) -> usize {
        self.rows.push(coeffs);
        self.senses.push(sense);
        self.rhs.push(rhs);
        self.rows.len() - 1
    }

    /// Add a row given as `(variable, coefficient)` pairs.
    pub fn add_sparse_row(&mut self, terms: &[(usize, f64)], sense: Sense, rhs: f64) -> usize {
        let mut coeffs = vec![0.0; self.num_vars()];
        for &(v, a) in terms {
            coeffs[v] += a;
        }
        self.add_row(coeffs, sense, rhs)
    }

    pub fn set_bounds(&mut self, var: usize, lo: f64, hi: f64) {
        self.lo[var] = lo;
        self.hi[var] = hi;
    }

    fn check(&self) -> Result<()> {
        let nv = self.num_vars();
        let m = self.rows.len();
        if self.senses.len() != m || self.rhs.len() != m {
            return Err(Error::LengthMismatch { expected: m, found: self.senses.len().min(self.rhs.len()) });
        }
        if let Some(r) = self.rows.iter().find(|r| r.len() != nv) {
            return Err(Error::LengthMismatch { expected: nv, found: r.len() });
        }
        if self.lo.len() != nv || self.hi.len() != nv {
            return Err(Error::LengthMismatch { expected: nv, found: self.lo.len().min(self.hi.len()) });
        }
        let finite = self.objective.iter().chain(&self.rhs).chain(self.rows.iter().flatten());
        if finite.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("LP data must be finite"));
        }
        if self.lo.iter().zip(&self.hi).any(|(l, h)| !l.is_finite() || !(l <= h)) {
            return Err(Error::InvalidParameter("LP bounds need finite lo <= hi"));
        }
        Ok(())
    }

    /// Largest violation of a row or bound at `x`, scaled by `1 + |rhs|`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for ((row, sense), &b) in self.rows.iter().zip(&self.senses).zip(&self.rhs) {
            let lhs: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
            let viol = match sense {
                Sense::Le => lhs - b,
                Sense::Ge => b - lhs,
                Sense::Eq => libm::fabs(lhs - b),
            };
            worst = worst.max(viol / (1.0 + libm::fabs(b)));
        }
        for ((&v, &l), &h) in x.iter().zip(&self.lo).zip(&self.hi) {
            worst = worst.max(l - v).max(v - h);
        }
        worst
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub value: f64,
    /// One multiplier per row: `≥ 0` on `Ge` rows, `≤ 0` on `Le` rows.
    pub dual: Vec<f64>,
    /// Lagrangian dual objective at `dual`, computed independently of `value`.
    pub dual_value: f64,
}

impl LpSolution {
    fn failed(status: LpStatus, nv: usize, m: usize) -> Self {
        LpSolution { status, x: vec![0.0; nv], value: f64::NAN, dual: vec![0.0; m], dual_value: f64::NAN }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

struct Tableau {
    m: usize,
    width: usize,
    t: Vec<f64>,
    obj: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * self.width + c]
    }

    fn rhs_col(&self) -> usize {
        self.width - 1
    }

    fn set_costs(&mut self, cost: &[f64]) {
        let w = self.width;
        self.obj.clear();
        self.obj.extend_from_slice(cost);
        self.obj.push(0.0);
        for r in 0..self.m {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                let row = &self.t[r * w..(r + 1) * w];
                for (o, a) in self.obj.iter_mut().zip(row) {
                    *o -= cb * a;
                }
            }
        }
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let inv = 1.0 / self.at(pr, pc);
        for v in &mut self.t[pr * w..(pr + 1) * w] {
            *v *= inv;
        }
        self.t[pr * w + pc] = 1.0;
        let (before, rest) = self.t.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[pc];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
                row[pc] = 0.0;
            }
        }
        let f = self.obj[pc];
        if f != 0.0 {
            for (v, p) in self.obj.iter_mut().zip(prow.iter()) {
                *v -= f * p;
            }
            self.obj[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Bland's rule simplex on columns `0..allowed`.
    fn run(&mut self, allowed: usize, max_iters: usize) -> LpStatus {
        let rhs = self.rhs_col();
        for _ in 0..max_iters {
            let Some(e) = (0..allowed).find(|&c| self.obj[c] < -tol::PIVOT) else {
                return LpStatus::Optimal;
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m {
                let a = self.at(r, e);
                if a > tol::PIVOT {
                    let ratio = self.at(r, rhs).max(0.0) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((br, bq)) => {
                            if ratio < bq - 1e-12 * (1.0 + bq)
                                || (ratio <= bq + 1e-12 * (1.0 + bq) && self.basis[r] < self.basis[br])
                            {
                                Some((r, ratio))
                            } else {
                                Some((br, bq))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return LpStatus::Unbounded,
                Some((r, _)) => self.pivot(r, e),
            }
        }
        LpStatus::IterationLimit
    }
}

/// Solve `lp` to optimality, or report why not.
///
/// Errors only on malformed input; solver outcomes are in `status`.
pub fn solve_lp(lp: &DenseLP) -> Result<LpSolution> {
    lp.check()?;
    let nv = lp.num_vars();
    let m0 = lp.num_rows();

    // Shift to x' = x - lo >= 0 and append finite upper bounds as rows.
    let mut rows: Vec<(Vec<(usize, f64)>, Sense, f64)> = Vec::new();
    for ((row, &sense), &b) in lp.rows.iter().zip(&lp.senses).zip(&lp.rhs) {
        let shift: f64 = row.iter().zip(&lp.lo).map(|(a, l)| a * l).sum();
        let terms = row.iter().enumerate().filter(|(_, a)| **a != 0.0).map(|(v, &a)| (v, a)).collect();
        rows.push((terms, sense, b - shift));
    }
    for v in 0..nv {
        if lp.hi[v].is_finite() {
            rows.push((vec![(v, 1.0)], Sense::Le, lp.hi[v] - lp.lo[v]));
        }
    }
    let m = rows.len();
    let mut flip = vec![1.0; m];
    for (r, (terms, sense, b)) in rows.iter_mut().enumerate() {
        if *b < 0.0 {
            flip[r] = -1.0;
            *b = -*b;
            for t in terms.iter_mut() {
                t.1 = -t.1;
            }
            *sense = match *sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }
    let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
    let first_art = nv + n_slack;
    let ncols = first_art + n_art;
    let width = ncols + 1;
    let mut t = vec![0.0; m * width];
    let mut basis = vec![0; m];
    let mut ident = vec![0; m];
    let (mut s, mut a) = (nv, first_art);
    for (r, (terms, sense, b)) in rows.iter().enumerate() {
        let row = &mut t[r * width..(r + 1) * width];
        for &(v, c) in terms {
            row[v] += c;
        }
        row[ncols] = *b;
        match sense {
            Sense::Le => {
                row[s] = 1.0;
                ident[r] = s;
                s += 1;
            }
            Sense::Ge => {
                row[s] = -1.0;
                s += 1;
                row[a] = 1.0;
                ident[r] = a;
                a += 1;
            }
            Sense::Eq => {
                row[a] = 1.0;
                ident[r] = a;
                a += 1;
            }
        }
        basis[r] = ident[r];
    }
    let mut tab = Tableau { m, width, t, obj: Vec::new(), basis };
    let max_iters = 200 * (m + ncols) + 1000;

    if n_art > 0 {
        let mut cost = vec![0.0; ncols];
        cost[first_art..].fill(1.0);
        tab.set_costs(&cost);
        match tab.run(first_art, max_iters) {
            LpStatus::Optimal => {}
            // phase one is bounded below by zero
            LpStatus::Unbounded => return Ok(LpSolution::failed(LpStatus::Numerical, nv, m0)),
            other => return Ok(LpSolution::failed(other, nv, m0)),
        }
        let infeas = -tab.obj[ncols];
        let scale = 1.0 + rows.iter().map(|r| r.2).fold(0.0, f64::max);
        if infeas > tol::LP * scale {
            return Ok(LpSolution::failed(LpStatus::Infeasible, nv, m0));
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..m {
            if tab.basis[r] >= first_art {
                if let Some(c) = (0..first_art).find(|&c| libm::fabs(tab.at(r, c)) > tol::PIVOT) {
                    tab.pivot(r, c);
                }
            }
        }
    }

    let mut cost = vec![0.0; ncols];
    cost[..nv].copy_from_slice(&lp.objective);
    tab.set_costs(&cost);
    let status = tab.run(first_art, max_iters);
    if status != LpStatus::Optimal {
        return Ok(LpSolution::failed(status, nv, m0));
    }

    let mut x = lp.lo.clone();
    for r in 0..m {
        let b = tab.basis[r];
        if b < nv {
            x[b] += tab.at(r, ncols).max(0.0);
        }
    }
    let value = lp.objective_value(&x);
    let dual: Vec<f64> = (0..m0).map(|r| -tab.obj[ident[r]] * flip[r]).collect();
    let dual_value = lagrangian_dual_value(lp, &dual);
    let ok = lp.max_violation(&x) <= tol::LP
        && libm::fabs(value - dual_value) <= tol::LP * (1.0 + libm::fabs(value))
        && dual_signs_ok(lp, &dual);
    let status = if ok { LpStatus::Optimal } else { LpStatus::Numerical };
    Ok(LpSolution { status, x, value, dual, dual_value })
}

fn dual_signs_ok(lp: &DenseLP, dual: &[f64]) -> bool {
    lp.senses.iter().zip(dual).all(|(s, &y)| match s {
        Sense::Ge => y >= -tol::LP,
        Sense::Le => y <= tol::LP,
        Sense::Eq => true,
    })
}

/// `y·b + Σ_v min over [lo_v, hi_v] of (c_v − yᵀA_v)·x_v`.
pub fn lagrangian_dual_value(lp: &DenseLP, dual: &[f64]) -> f64 {
    let mut val: f64 = dual.iter().zip(&lp.rhs).map(|(y, b)| y * b).sum();
    for v in 0..lp.num_vars() {
        let reduced = lp.objective[v] - lp.rows.iter().zip(dual).map(|(r, y)| r[v] * y).sum::<f64>();
        let at = if reduced >= 0.0 || !lp.hi[v].is_finite() { lp.lo[v] } else { lp.hi[v] };
        val += reduced * at;
    }
    val
}

/// Variable index of `x_ij` (center `i` serves client `j`).
#[inline]
pub fn x_var(n: usize, i: usize, j: usize) -> usize {
    i * n + j
}

/// Variable index of `y_i`.
#[inline]
pub fn y_var(n: usize, i: usize) -> usize {
    n * n + i
}

/// The facility-location LP with service costs `demand_j · proxy(d(i,j))`.
///
/// Rows: `n` coverage rows `Σ_i x_ij ≥ 1`, then `n²` link rows
/// `x_ij − y_i ≤ 0` (row `n + i·n + j`), then the budget row `Σ_i y_i ≤ k`.
pub fn build_pb_lp(inst: &MetricInstance, proxy: &ProxySpec, demands: &[u64]) -> Result<DenseLP> {
    let n = inst.n();
    if demands.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: demands.len() });
    }
    let mut obj = vec![0.0; n * n + n];
    for i in 0..n {
        for j in 0..n {
            obj[x_var(n, i, j)] = demands[j] as f64 * proxy.eval(inst.d(i, j));
        }
    }
    let mut lp = DenseLP::new(obj);
    for j in 0..n {
        let terms: Vec<(usize, f64)> = (0..n).map(|i| (x_var(n, i, j), 1.0)).collect();
        lp.add_sparse_row(&terms, Sense::Ge, 1.0);
    }
    for i in 0..n {
        for j in 0..n {
            lp.add_sparse_row(&[(x_var(n, i, j), 1.0), (y_var(n, i), -1.0)], Sense::Le, 0.0);
        }
    }
    let terms: Vec<(usize, f64)> = (0..n).map(|i| (y_var(n, i), 1.0)).collect();
    lp.add_sparse_row(&terms, Sense::Le, inst.k() as f64);
    Ok(lp)
}

/// An optimal solution of [`build_pb_lp`] split into its natural pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct PbSolution {
    pub value: f64,
    /// Row-major `x_ij`.
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Coverage-row duals.
    pub alpha: Vec<f64>,
    /// Price of the budget row (nonnegative).
    pub lambda: f64,
}

pub fn solve_pb(inst: &MetricInstance, proxy: &ProxySpec, demands: &[u64]) -> Result<PbSolution> {
    let lp = build_pb_lp(inst, proxy, demands)?;
    let sol = solve_lp(&lp)?;
    if !sol.is_optimal() {
        return Err(Error::Lp(sol.status));
    }
    let n = inst.n();
    Ok(PbSolution {
        value: sol.value,
        x: sol.x[..n * n].to_vec(),
        y: sol.x[n * n..].to_vec(),
        alpha: sol.dual[..n].to_vec(),
        lambda: -sol.dual[n + n * n],
    })
}

pub fn lp_opt_value(inst: &MetricInstance, proxy: &ProxySpec, demands: &[u64]) -> Result<f64> {
    solve_pb(inst, proxy, demands).map(|s| s.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::metric_from_points;
    use crate::ordered_cost::TruncatedCostParams;
    use proptest::prelude::*;

    fn line(xs: &[f64], k: usize) -> MetricInstance {
        let coords: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        metric_from_points(&coords, k).unwrap()
    }

    #[test]
    fn one_variable() {
        let mut lp = DenseLP::new(vec![1.0]);
        lp.add_row(vec![1.0], Sense::Ge, 3.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 3.0).abs() < 1e-12);
        assert!((s.dual[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bound_attained() {
        let mut lp = DenseLP::new(vec![-1.0]);
        lp.set_bounds(0, 0.0, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value + 1.0).abs() < 1e-12);
        assert!((s.x[0] - 1.0).abs() < 1e-12);
        assert!((s.dual_value + 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_lower_bounds_and_equalities() {
        // min x + 2y, x + y = 1, x in [-2, 5], y in [-1, 3] -> x = 2, y = -1
        let mut lp = DenseLP::new(vec![1.0, 2.0]);
        lp.add_row(vec![1.0, 1.0], Sense::Eq, 1.0);
        lp.set_bounds(0, -2.0, 5.0);
        lp.set_bounds(1, -1.0, 3.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.value - 0.0).abs() < 1e-12, "{s:?}");
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = DenseLP::new(vec![1.0]);
        lp.add_row(vec![1.0], Sense::Le, 1.0);
        lp.add_row(vec![1.0], Sense::Ge, 2.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
        let mut lp = DenseLP::new(vec![-1.0, 0.0]);
        lp.add_row(vec![1.0, -1.0], Sense::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn malformed_input_is_an_error() {
        let mut lp = DenseLP::new(vec![1.0, 1.0]);
        lp.add_row(vec![1.0], Sense::Ge, 1.0);
        assert!(solve_lp(&lp).is_err());
        let mut lp = DenseLP::new(vec![1.0]);
        lp.set_bounds(0, 2.0, 1.0);
        assert!(solve_lp(&lp).is_err());
    }

    #[test]
    fn kmedian_lp_on_line() {
        let inst = line(&[0.0, 1.0, 10.0], 2);
        let v = lp_opt_value(&inst, &ProxySpec::Identity, &[1, 1, 1]).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_points_one_center() {
        let inst = line(&[0.0, 4.0], 1);
        let v = lp_opt_value(&inst, &ProxySpec::Identity, &[1, 1]).unwrap();
        assert!((v - 4.0).abs() < 1e-9);
    }

    #[test]
    fn truncated_proxy_above_max_is_zero() {
        let inst = line(&[0.0, 1.0, 10.0, 11.0], 1);
        let p = ProxySpec::Truncated(TruncatedCostParams::new(10.0, 1).unwrap());
        assert_eq!(lp_opt_value(&inst, &p, &[1; 4]).unwrap(), 0.0);
    }

    #[test]
    fn demands_scale_objective() {
        let inst = line(&[0.0, 1.0, 10.0], 2);
        let lp1 = build_pb_lp(&inst, &ProxySpec::Identity, &[1, 1, 1]).unwrap();
        let lp2 = build_pb_lp(&inst, &ProxySpec::Identity, &[1, 2, 1]).unwrap();
        for i in 0..3 {
            assert_eq!(lp2.objective[x_var(3, i, 1)], 2.0 * lp1.objective[x_var(3, i, 1)]);
            assert_eq!(lp2.objective[x_var(3, i, 0)], lp1.objective[x_var(3, i, 0)]);
        }
        assert!(build_pb_lp(&inst, &ProxySpec::Identity, &[1, 1]).is_err());
    }

    #[test]
    fn pb_duals_are_consistent() {
        let inst = crate::instance::gen_random_metric(7, 2, 11, 10.0).unwrap();
        let s = solve_pb(&inst, &ProxySpec::Identity, &[1; 7]).unwrap();
        let dual: f64 = s.alpha.iter().sum::<f64>() - 2.0 * s.lambda;
        assert!((dual - s.value).abs() < 1e-7 * (1.0 + s.value));
        assert!(s.lambda >= -1e-9);
        assert!(s.y.iter().sum::<f64>() <= 2.0 + 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn random_lps_verify(c in proptest::collection::vec(-5.0f64..5.0, 3),
                             a in proptest::collection::vec(-3.0f64..3.0, 9),
                             b in proptest::collection::vec(0.0f64..5.0, 3)) {
            // bounded box keeps every instance feasible and bounded
            let mut lp = DenseLP::new(c);
            for r in 0..3 {
                lp.add_row(a[3 * r..3 * r + 3].to_vec(), Sense::Le, b[r]);
            }
            for v in 0..3 {
                lp.set_bounds(v, 0.0, 4.0);
            }
            let s = solve_lp(&lp).unwrap();
            prop_assert_eq!(s.status, LpStatus::Optimal);
            // no vertex of the box that is feasible beats the optimum
            for mask in 0..8u32 {
                let x: Vec<f64> = (0..3).map(|v| if mask >> v & 1 == 1 { 4.0 } else { 0.0 }).collect();
                if lp.max_violation(&x) <= 0.0 {
                    prop_assert!(s.value <= lp.objective_value(&x) + 1e-9);
                }
            }
        }
    }
}
