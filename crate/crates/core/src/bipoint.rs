//! Rounding a convex combination of two primal-dual solutions.
//!
//! Given runs with `|T₁| = k₁ > k > k₂ = |T₂|`, the combination
//! `a·T₁ + b·T₂` with `a·k₁ + b·k₂ = k` opens `k` centers fractionally. The
//! rounding matches every `T₂` facility to a `T₁` facility through a greedy
//! clustering of the clients, then picks an integral opening by solving a
//! small separable LP exactly.
//!
//! All sums are weighted by the client demands of the underlying runs.

use alloc::vec;
use alloc::vec::Vec;

use crate::instance::{nearest_assignment, MetricInstance, Solution};
use crate::lp::{DenseLP, Sense};
use crate::ordered_cost::ProxySpec;
use crate::primal_dual::PdResult;
use crate::tol;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Bipoint {
    pub res1: PdResult,
    pub res2: PdResult,
    pub k: usize,
    pub k1: usize,
    pub k2: usize,
    pub a: f64,
    pub b: f64,
    /// Nearest `T₁` / `T₂` center of each client.
    pub i1: Vec<usize>,
    pub i2: Vec<usize>,
    /// `proxy3` of the distance to `i1` / `i2`.
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub c1: f64,
    pub c2: f64,
    pub proxy3: ProxySpec,
}

impl Bipoint {
    pub fn n(&self) -> usize {
        self.i1.len()
    }

    pub fn demand(&self, j: usize) -> f64 {
        self.res1.demands[j] as f64
    }

    /// `a·C₁ + b·C₂`.
    pub fn combined_cost(&self) -> f64 {
        self.a * self.c1 + self.b * self.c2
    }
}

pub fn make_bipoint(
    inst: &MetricInstance,
    res1: PdResult,
    res2: PdResult,
    k: usize,
    proxy3: &ProxySpec,
) -> Result<Bipoint> {
    let (k1, k2) = (res1.num_centers(), res2.num_centers());
    if !(k2 < k && k < k1) {
        return Err(Error::BudgetOutsideBracket { k, k1, k2 });
    }
    if res1.demands != res2.demands || res1.n() != inst.n() {
        return Err(Error::LengthMismatch { expected: inst.n(), found: res2.n() });
    }
    let a = (k - k2) as f64 / (k1 - k2) as f64;
    let b = 1.0 - a;
    let i1 = nearest_assignment(inst, &res1.centers)?.assign;
    let i2 = nearest_assignment(inst, &res2.centers)?.assign;
    let d1: Vec<f64> = (0..inst.n()).map(|j| proxy3.eval(inst.d(i1[j], j))).collect();
    let d2: Vec<f64> = (0..inst.n()).map(|j| proxy3.eval(inst.d(i2[j], j))).collect();
    let dem = &res1.demands;
    let c1 = d1.iter().zip(dem).map(|(d, &w)| d * w as f64).sum();
    let c2 = d2.iter().zip(dem).map(|(d, &w)| d * w as f64).sum();
    Ok(Bipoint { res1, res2, k, k1, k2, a, b, i1, i2, d1, d2, c1, c2, proxy3: proxy3.clone() })
}

/// Which client is picked next as a cluster center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterKey {
    /// Smallest `d₁ + d₂`.
    Sum,
    /// Smallest `max(d₁, d₂)`.
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    /// Cluster-center clients in selection order.
    pub centers: Vec<usize>,
    /// `(T₁ facility, T₂ facility)` pairs; the first `from_clients` come from
    /// cluster centers, the rest from the completion step.
    pub pairs: Vec<(usize, usize)>,
    pub from_clients: usize,
    /// Cluster center that removed each client.
    pub sigma: Vec<usize>,
    /// Matched `T₁` facilities, ascending.
    pub matched_t1: Vec<usize>,
    /// Clients whose `T₁` center is matched.
    pub in_s: Vec<bool>,
}

pub fn cluster(bp: &Bipoint, key: ClusterKey) -> Clustering {
    let n = bp.n();
    let key_of = |j: usize| match key {
        ClusterKey::Sum => bp.d1[j] + bp.d2[j],
        ClusterKey::Max => bp.d1[j].max(bp.d2[j]),
    };
    let mut removed = vec![false; n];
    let mut sigma = vec![usize::MAX; n];
    let mut centers = Vec::new();
    let mut pairs = Vec::new();
    loop {
        let mut pick: Option<usize> = None;
        for j in (0..n).filter(|&j| !removed[j]) {
            if pick.map_or(true, |p| key_of(j) < key_of(p)) {
                pick = Some(j);
            }
        }
        let Some(j) = pick else { break };
        centers.push(j);
        pairs.push((bp.i1[j], bp.i2[j]));
        for k in 0..n {
            if !removed[k] && (bp.i1[k] == bp.i1[j] || bp.i2[k] == bp.i2[j]) {
                removed[k] = true;
                sigma[k] = j;
            }
        }
    }
    let from_clients = pairs.len();
    for &t2 in &bp.res2.centers {
        if pairs.iter().all(|p| p.1 != t2) {
            let t1 = *bp.res1.centers.iter().find(|&&f| pairs.iter().all(|p| p.0 != f)).expect("k1 > k2");
            pairs.push((t1, t2));
        }
    }
    let mut matched_t1: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    matched_t1.sort_unstable();
    let in_s = (0..n).map(|j| matched_t1.binary_search(&bp.i1[j]).is_ok()).collect();
    Clustering { centers, pairs, from_clients, sigma, matched_t1, in_s }
}

/// Check the structural properties of a clustering.
pub fn check_clustering(bp: &Bipoint, cl: &Clustering) -> Result<()> {
    let bad = |what| Err(Error::Certificate { what, lhs: 0.0, rhs: 0.0 });
    if cl.pairs.len() != bp.k2 || cl.matched_t1.len() != bp.k2 {
        return bad("matching has k2 pairs");
    }
    let mut t2: Vec<usize> = cl.pairs.iter().map(|p| p.1).collect();
    t2.sort_unstable();
    if t2 != bp.res2.centers {
        return bad("every T2 facility matched once");
    }
    if cl.matched_t1.windows(2).any(|w| w[0] == w[1])
        || cl.matched_t1.iter().any(|f| bp.res1.centers.binary_search(f).is_err())
    {
        return bad("matched T1 facilities distinct");
    }
    for &j in &cl.centers {
        if cl.sigma[j] != j {
            return bad("cluster centers map to themselves");
        }
    }
    for k in 0..bp.n() {
        let j = cl.sigma[k];
        if j >= bp.n() || !cl.centers.contains(&j) {
            return bad("sigma maps into cluster centers");
        }
        if bp.i1[k] != bp.i1[j] && bp.i2[k] != bp.i2[j] {
            return bad("client shares a facility with its cluster center");
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpeningVariant {
    /// Unopened clients outside `S` pay `d₂ₖ + d₁σ + d₂σ`.
    Rp,
    /// Unopened clients outside `S` pay `3·max(d₁ₖ, d₂ₖ)`.
    Grp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpeningChoice {
    /// Open the matched `T₁` side (`true`) or all of `T₂`.
    pub theta: bool,
    /// Extra unmatched `T₁` facilities to open, ascending.
    pub z: Vec<usize>,
    pub objective: f64,
}

fn alt_cost(bp: &Bipoint, cl: &Clustering, variant: OpeningVariant, k: usize) -> f64 {
    match variant {
        OpeningVariant::Rp => {
            let s = cl.sigma[k];
            bp.d2[k] + bp.d1[s] + bp.d2[s]
        }
        OpeningVariant::Grp => 3.0 * bp.d1[k].max(bp.d2[k]),
    }
}

/// Opening-LP objective at `θ` and per-facility `z` (indexed by point).
pub fn opening_objective(bp: &Bipoint, cl: &Clustering, variant: OpeningVariant, theta: f64, z: &[f64]) -> f64 {
    (0..bp.n())
        .map(|k| bp.demand(k) * client_share(bp, cl, variant, theta, z, k))
        .sum()
}

fn client_share(bp: &Bipoint, cl: &Clustering, variant: OpeningVariant, theta: f64, z: &[f64], k: usize) -> f64 {
    if cl.in_s[k] {
        theta * bp.d1[k] + (1.0 - theta) * bp.d2[k]
    } else {
        let zk = z[bp.i1[k]];
        zk * bp.d1[k] + (1.0 - zk) * alt_cost(bp, cl, variant, k)
    }
}

/// Unmatched `T₁` facilities, ascending.
pub fn unmatched_t1(bp: &Bipoint, cl: &Clustering) -> Vec<usize> {
    bp.res1.centers.iter().copied().filter(|f| cl.matched_t1.binary_search(f).is_err()).collect()
}

/// The fractional point `θ = a`, `z ≡ a` and its objective.
pub fn fractional_point(bp: &Bipoint, cl: &Clustering, variant: OpeningVariant) -> (Vec<f64>, f64) {
    let mut z = vec![0.0; bp.n()];
    for f in unmatched_t1(bp, cl) {
        z[f] = bp.a;
    }
    let obj = opening_objective(bp, cl, variant, bp.a, &z);
    (z, obj)
}

/// Exact integral optimum of the opening LP.
///
/// The objective separates into a `θ` term and one term per unmatched
/// facility, so the optimum opens the facilities with the most negative
/// savings, up to the budget `k − k₂`.
pub fn solve_opening_lp(bp: &Bipoint, cl: &Clustering, variant: OpeningVariant) -> OpeningChoice {
    let (mut s1, mut s2) = (0.0, 0.0);
    for k in (0..bp.n()).filter(|&k| cl.in_s[k]) {
        s1 += bp.demand(k) * bp.d1[k];
        s2 += bp.demand(k) * bp.d2[k];
    }
    let theta = s1 <= s2;
    let mut delta: Vec<(f64, usize)> = unmatched_t1(bp, cl).into_iter().map(|f| (0.0, f)).collect();
    for k in (0..bp.n()).filter(|&k| !cl.in_s[k]) {
        let slot = delta.iter_mut().find(|e| e.1 == bp.i1[k]).expect("unmatched T1 center");
        slot.0 += bp.demand(k) * (bp.d1[k] - alt_cost(bp, cl, variant, k));
    }
    delta.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let mut z: Vec<usize> =
        delta.iter().take_while(|e| e.0 < 0.0).take(bp.k - bp.k2).map(|e| e.1).collect();
    z.sort_unstable();
    let mut zv = vec![0.0; bp.n()];
    for &f in &z {
        zv[f] = 1.0;
    }
    let objective = opening_objective(bp, cl, variant, if theta { 1.0 } else { 0.0 }, &zv);
    OpeningChoice { theta, z, objective }
}

/// The opening LP as a [`DenseLP`] over `(θ, z_f for unmatched f)`, plus the
/// constant offset of its objective.
pub fn opening_dense_lp(bp: &Bipoint, cl: &Clustering, variant: OpeningVariant) -> (DenseLP, f64) {
    let free = unmatched_t1(bp, cl);
    let mut obj = vec![0.0; 1 + free.len()];
    let mut constant = 0.0;
    for k in 0..bp.n() {
        let w = bp.demand(k);
        if cl.in_s[k] {
            obj[0] += w * (bp.d1[k] - bp.d2[k]);
            constant += w * bp.d2[k];
        } else {
            let v = 1 + free.iter().position(|&f| f == bp.i1[k]).expect("unmatched T1 center");
            let alt = alt_cost(bp, cl, variant, k);
            obj[v] += w * (bp.d1[k] - alt);
            constant += w * alt;
        }
    }
    let mut lp = DenseLP::new(obj);
    for v in 0..=free.len() {
        lp.set_bounds(v, 0.0, 1.0);
    }
    let budget: Vec<(usize, f64)> = (1..=free.len()).map(|v| (v, 1.0)).collect();
    lp.add_sparse_row(&budget, Sense::Le, (bp.k - bp.k2) as f64);
    (lp, constant)
}

/// `(θ ? matched T₁ : T₂) ∪ z`, nearest-assigned.
pub fn open_basic(inst: &MetricInstance, bp: &Bipoint, cl: &Clustering, choice: &OpeningChoice) -> Result<Solution> {
    let mut centers = if choice.theta { cl.matched_t1.clone() } else { bp.res2.centers.clone() };
    centers.extend_from_slice(&choice.z);
    nearest_assignment(inst, &centers)
}

/// The refined opening: completion pairs open their `θ` side, and a cluster
/// center whose chosen-side cost is zero opens at itself.
pub fn open_improved(inst: &MetricInstance, bp: &Bipoint, cl: &Clustering, choice: &OpeningChoice) -> Result<Solution> {
    let mut centers = choice.z.clone();
    for &(t1, t2) in &cl.pairs[cl.from_clients..] {
        centers.push(if choice.theta { t1 } else { t2 });
    }
    for &j in &cl.centers {
        let own = if choice.theta { bp.d1[j] } else { bp.d2[j] };
        centers.push(if own == 0.0 {
            j
        } else if choice.theta {
            bp.i1[j]
        } else {
            bp.i2[j]
        });
    }
    nearest_assignment(inst, &centers)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundingMode {
    /// Truncated (or identity) proxies: sum key, `R-P` objective, shortcut
    /// when `b ≥ 1/2`.
    Centrum { improved: bool },
    /// Surrogate proxies: max key, `GR-P` objective, shortcut when `b ≥ 1/3`,
    /// basic opening.
    General,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundingReport {
    pub solution: Solution,
    /// `T₂` was returned directly.
    pub shortcut: bool,
    pub clustering: Option<Clustering>,
    pub choice: Option<OpeningChoice>,
    /// Objective of the fractional point `θ = a`, `z ≡ a`.
    pub fractional: Option<f64>,
}

/// Round a bipoint to at most `k` centers, verifying every bound the rounding
/// is supposed to meet on the way.
pub fn round_bipoint(inst: &MetricInstance, bp: &Bipoint, mode: RoundingMode) -> Result<RoundingReport> {
    let shortcut_at = match mode {
        RoundingMode::Centrum { .. } => 0.5,
        RoundingMode::General => 1.0 / 3.0,
    };
    if bp.b >= shortcut_at {
        let solution = nearest_assignment(inst, &bp.res2.centers)?;
        return Ok(RoundingReport { solution, shortcut: true, clustering: None, choice: None, fractional: None });
    }
    let (key, variant, factor) = match mode {
        RoundingMode::Centrum { .. } => (ClusterKey::Sum, OpeningVariant::Rp, 2.0),
        RoundingMode::General => (ClusterKey::Max, OpeningVariant::Grp, 3.0),
    };
    let cl = cluster(bp, key);
    check_clustering(bp, &cl)?;
    let choice = solve_opening_lp(bp, &cl, variant);
    let (z_frac, fractional) = fractional_point(bp, &cl, variant);

    let opened_frac: f64 = z_frac.iter().sum();
    let budget = (bp.k - bp.k2) as f64;
    if (opened_frac - budget).abs() > tol::EXACT_REL * (1.0 + budget) {
        return Err(Error::Certificate { what: "fractional opening uses the budget", lhs: opened_frac, rhs: budget });
    }
    let cap = factor * bp.combined_cost();
    if !tol::le_rel(fractional, cap, tol::EXACT_REL) {
        return Err(Error::Certificate { what: "fractional opening objective", lhs: fractional, rhs: cap });
    }
    if !tol::le_rel(choice.objective, fractional, tol::EXACT_REL) {
        return Err(Error::Certificate { what: "integral opening beats fractional", lhs: choice.objective, rhs: fractional });
    }

    let solution = match mode {
        RoundingMode::Centrum { improved: true } => open_improved(inst, bp, &cl, &choice)?,
        _ => open_basic(inst, bp, &cl, &choice)?,
    };
    if solution.centers.len() > bp.k {
        return Err(Error::Certificate {
            what: "at most k centers",
            lhs: solution.centers.len() as f64,
            rhs: bp.k as f64,
        });
    }
    check_client_bounds(bp, &cl, &choice, &solution, mode)?;
    Ok(RoundingReport { solution, shortcut: false, clustering: Some(cl), choice: Some(choice), fractional: Some(fractional) })
}

/// Per-client upper bound on the rounded assignment.
///
/// In centrum mode the bound is on the real distance `c_k`; in general mode it
/// is on `g(9; c_k)` and equals the client's share of the opening objective.
pub fn client_bound(bp: &Bipoint, cl: &Clustering, choice: &OpeningChoice, mode: RoundingMode, k: usize) -> f64 {
    let theta = if choice.theta { 1.0 } else { 0.0 };
    let opened_k = choice.z.binary_search(&bp.i1[k]).is_ok();
    match mode {
        RoundingMode::Centrum { improved } => {
            let s = zero_radius(&bp.proxy3);
            if cl.in_s[k] {
                theta * bp.d1[k] + (1.0 - theta) * bp.d2[k] + if improved { 2.0 * s } else { s }
            } else if opened_k {
                bp.d1[k] + s
            } else {
                let j = cl.sigma[k];
                bp.d2[k] + bp.d1[j] + bp.d2[j] + if improved { 2.0 * s } else { 3.0 * s }
            }
        }
        RoundingMode::General => {
            let mut z = vec![0.0; bp.n()];
            if opened_k {
                z[bp.i1[k]] = 1.0;
            }
            client_share(bp, cl, OpeningVariant::Grp, theta, &z, k)
        }
    }
}

/// Largest distance a centrum-style proxy maps to zero.
fn zero_radius(p: &ProxySpec) -> f64 {
    match p {
        ProxySpec::Truncated(t) => t.threshold(),
        _ => 0.0,
    }
}

pub fn check_client_bounds(
    bp: &Bipoint,
    cl: &Clustering,
    choice: &OpeningChoice,
    sol: &Solution,
    mode: RoundingMode,
) -> Result<()> {
    let g9 = bp.proxy3.dilate(3.0);
    for k in 0..bp.n() {
        let bound = client_bound(bp, cl, choice, mode, k);
        let lhs = match mode {
            RoundingMode::Centrum { .. } => sol.costs[k],
            RoundingMode::General => g9.eval(sol.costs[k]),
        };
        if !tol::le_rel(lhs, bound, tol::EXACT_REL) {
            return Err(Error::Certificate { what: "per-client rounding bound", lhs, rhs: bound });
        }
    }
    Ok(())
}
