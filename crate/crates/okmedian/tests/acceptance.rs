//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Built with `harness = false` so the lines reach the terminal.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use okmedian::report::Format;
use okmedian::suites::{centrum_suite, claims_suite, ordered_suite, run_suite, CentrumRow, Suite, SuiteConfig, Summary};
use okmedian_core::bipoint::{cluster, make_bipoint, opening_dense_lp, solve_opening_lp, ClusterKey, OpeningVariant};
use okmedian_core::instance::{gen_euclidean, gen_random_metric};
use okmedian_core::lp::{solve_lp, LpStatus};
use okmedian_core::ordered_cost::{ordered_cost, truncate_weights};
use okmedian_core::primal_dual::{lambda_search, LambdaOutcome};
use okmedian_core::{ProxySpec, TruncatedCostParams, WeightVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_241;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or("-".into(), |v| format!("{v:.4}"))
}

fn clean(s: &Summary) -> bool {
    s.violations == 0 && s.checks > 0
}

/// Maximum of `Σ wᵢ c_{π(i)}` over all permutations, by Heap's algorithm.
fn permutation_max(w: &[f64], c: &[f64]) -> f64 {
    let mut p: Vec<f64> = c.to_vec();
    let n = p.len();
    let eval = |p: &[f64]| w.iter().zip(p).map(|(a, b)| a * b).sum::<f64>();
    let mut best = eval(&p);
    let mut idx = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if idx[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(idx[i], i);
            }
            best = best.max(eval(&p));
            idx[i] += 1;
            i = 0;
        } else {
            idx[i] = 0;
            i += 1;
        }
    }
    best
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn sorted_dot(w: &[f64], v: &[f64]) -> f64 {
    w.iter().zip(sorted_desc(v)).map(|(a, b)| a * b).sum()
}

/// Every length-`n` index sequence over `0..size`.
fn grid(n: usize, size: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..size.pow(n as u32)).map(move |mut code| {
        (0..n)
            .map(|_| {
                let d = code % size;
                code /= size;
                d
            })
            .collect()
    })
}

fn proxy_suite() -> Outcome {
    let cfg = SuiteConfig::new(10_000, SEED);
    let start = Instant::now();
    let (_, s) = claims_suite(&cfg);
    let took = start.elapsed();
    outcome(
        clean(&s) && took < Duration::from_secs(5),
        format!(
            "{} draws, {} checks, {} violations, worst rel excess {:e}, {:.2}s",
            s.trials,
            s.checks,
            s.violations,
            s.ratio_max.unwrap_or(f64::NAN),
            took.as_secs_f64()
        ),
    )
}

fn objective_equivalence() -> Outcome {
    let start = Instant::now();
    let costs = [0.0, 1.0, 3.5];
    let weights = [2.0, 1.0, 0.0];
    let (mut cases, mut bad) = (0u64, 0u64);
    for n in 1..=6 {
        for wi in grid(n, weights.len()).filter(|wi| wi.windows(2).all(|p| p[0] <= p[1])) {
            let w: Vec<f64> = wi.iter().map(|&i| weights[i]).collect();
            let wv = WeightVector::new(w.clone()).unwrap();
            for ci in grid(n, costs.len()) {
                let c: Vec<f64> = ci.iter().map(|&i| costs[i]).collect();
                cases += 1;
                if ordered_cost(&wv, &c).unwrap() != permutation_max(&w, &c) {
                    bad += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=7);
        let w = sorted_desc(&(0..n).map(|_| rng.gen_range(0.0..10.0)).collect::<Vec<_>>());
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..100.0)).collect();
        cases += 1;
        if ordered_cost(&WeightVector::new(w.clone()).unwrap(), &c).unwrap() != permutation_max(&w, &c) {
            bad += 1;
        }
    }
    let took = start.elapsed();
    outcome(bad == 0 && took < Duration::from_secs(10), format!("{cases} cases, {bad} mismatches, {:.2}s", took.as_secs_f64()))
}

fn weight_truncation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let tol = 1e-12;
    let (mut bad, mut shape) = (0u32, 0u32);
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=15);
        let raw: Vec<f64> = (0..n)
            .map(|_| match rng.gen_range(0..3) {
                0 => rng.gen_range(0.0..0.05),
                _ => rng.gen_range(0.0..10.0),
            })
            .collect();
        let w = sorted_desc(&raw);
        let eps = rng.gen_range(0.01..=1.0);
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..100.0)).collect();
        let threshold = eps * w[0] / n as f64;
        let expect: Vec<f64> = w.iter().map(|&x| if x >= threshold { x } else { 0.0 }).collect();
        let cut = truncate_weights(&WeightVector::new(w.clone()).unwrap(), eps);
        if cut.as_slice() != expect.as_slice() {
            shape += 1;
        }
        let full = sorted_dot(&w, &v);
        let trunc = sorted_dot(&expect, &v);
        let slack = tol * (1.0 + full.abs());
        if !((1.0 - eps) * full <= trunc + slack && trunc <= full + slack) {
            bad += 1;
        }
    }
    outcome(bad == 0 && shape == 0, format!("10000 draws, {bad} sandwich violations, {shape} truncation mismatches"))
}

fn certificates(summaries: &[&Summary]) -> Outcome {
    let runs: u64 = summaries.iter().map(|s| s.pd_runs).sum();
    let violations: u64 = summaries.iter().map(|s| s.violations).sum();
    let cert = summaries.iter().filter_map(|s| s.worst_certificate).fold(f64::NEG_INFINITY, f64::max);
    let dual = summaries.iter().filter_map(|s| s.worst_weak_duality).fold(f64::NEG_INFINITY, f64::max);
    outcome(
        runs >= 1000 && violations == 0 && cert <= 1e-9 && dual <= 1e-7,
        format!("{runs} dual ascent runs, worst certificate excess {cert:e}, worst dual minus LP {dual:e}, {violations} suite violations"),
    )
}

fn centrum_pd(rows: &[CentrumRow], s: &Summary, took: Duration) -> Outcome {
    let eps = 0.1;
    let bad = rows
        .iter()
        .filter(|r| {
            !(r.pd_cost.is_some_and(|c| c <= (12.0 + 4.0 * eps) * r.bbar * (1.0 + 1e-9))
                && r.bbar <= (1.0 + eps) * r.opt * (1.0 + 1e-9))
        })
        .count();
    outcome(
        bad == 0 && took < Duration::from_secs(120),
        format!(
            "{} trials, {bad} bound failures; cost/B min {} p50 {} p90 {} max {}; cost/opt max {}; {:.1}s",
            rows.len(),
            fmt_opt(s.ratio_min),
            fmt_opt(s.ratio_p50),
            fmt_opt(s.ratio_p90),
            fmt_opt(s.ratio_max),
            fmt_opt(s.ratio2_max),
            took.as_secs_f64()
        ),
    )
}

fn lp_reduce(rows: &[CentrumRow], took: Duration) -> Outcome {
    let missing = rows.iter().filter(|r| r.lr_cost.is_none()).count();
    let violations: u32 = rows.iter().map(|r| r.violations).sum();
    let worst = rows.iter().filter_map(|r| r.lr_ratio_opt).fold(0.0, f64::max);
    outcome(
        missing == 0 && violations == 0 && took < Duration::from_secs(180),
        format!("{} trials, {missing} failed runs, {violations} check violations, cost/opt max {worst:.4}", rows.len()),
    )
}

fn general(s: &Summary, took: Duration) -> Outcome {
    outcome(
        clean(s) && took < Duration::from_secs(600),
        format!(
            "{} trials, {} checks, {} violations; cost/opt min {} p50 {} p90 {} max {}; chain/opt max {}; {:.1}s",
            s.trials,
            s.checks,
            s.violations,
            fmt_opt(s.ratio_min),
            fmt_opt(s.ratio_p50),
            fmt_opt(s.ratio_p90),
            fmt_opt(s.ratio_max),
            fmt_opt(s.ratio2_max),
            took.as_secs_f64()
        ),
    )
}

fn opening_lp() -> Outcome {
    let (mut bipoints, mut compared, mut bad, mut worst) = (0u32, 0u32, 0u32, 0.0f64);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    while bipoints < 500 {
        let n = rng.gen_range(6..=12);
        let k = rng.gen_range(2..=4);
        let seed = rng.gen();
        let inst = if rng.gen_bool(0.5) {
            gen_random_metric(n, k, seed, 20.0).unwrap()
        } else {
            gen_euclidean(n, k, seed, 2, 20.0).unwrap()
        };
        let proxy = if rng.gen_bool(0.5) {
            ProxySpec::Identity
        } else {
            let b = rng.gen_range(0.1..1.0) * inst.max_distance();
            ProxySpec::Truncated(TruncatedCostParams::new(b, rng.gen_range(1..=n)).unwrap())
        };
        let demands: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        let Ok(LambdaOutcome::Bracket(lo, hi)) = lambda_search(&inst, &proxy, &demands, 1e-4) else { continue };
        let bp = make_bipoint(&inst, lo, hi, k, &proxy.dilate(3.0)).unwrap();
        bipoints += 1;
        for key in [ClusterKey::Sum, ClusterKey::Max] {
            let cl = cluster(&bp, key);
            for variant in [OpeningVariant::Rp, OpeningVariant::Grp] {
                let greedy = solve_opening_lp(&bp, &cl, variant).objective;
                let (lp, constant) = opening_dense_lp(&bp, &cl, variant);
                let sol = solve_lp(&lp).unwrap();
                compared += 1;
                let diff =
                    if sol.status == LpStatus::Optimal { (greedy - (sol.value + constant)).abs() } else { f64::INFINITY };
                worst = worst.max(diff);
                bad += u32::from(!(diff <= 1e-9 * (1.0 + greedy.abs())));
            }
        }
    }
    outcome(bad == 0, format!("{bipoints} bipoints, {compared} opening LPs, {bad} mismatches, worst gap {worst:e}"))
}

fn render(suite: Suite, cfg: &SuiteConfig, threads: usize) -> Vec<u8> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| run_suite(suite, cfg, Format::Tsv, Vec::new()).unwrap().1)
}

fn determinism() -> Outcome {
    let plan = [(Suite::Claims, 500), (Suite::Centrum, 40), (Suite::Ordered, 8), (Suite::Lpcheck, 100)];
    let mut differing = Vec::new();
    for (suite, trials) in plan {
        let cfg = SuiteConfig::new(trials, SEED + 9);
        if render(suite, &cfg, 1) != render(suite, &cfg, 4) {
            differing.push(format!("{suite:?}"));
        }
    }
    let detail = if differing.is_empty() {
        "claims, centrum, ordered and lpcheck reports byte-identical under 1 and 4 threads".to_string()
    } else {
        format!("reports differ for {}", differing.join(", "))
    };
    outcome(differing.is_empty(), detail)
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "proxy-cost properties", proxy_suite()),
        (2, "objective equivalence", objective_equivalence()),
        (3, "weight truncation", weight_truncation()),
    ];

    let mut cfg = SuiteConfig::new(200, SEED + 5);
    cfg.eps = Some(0.1);
    let start = Instant::now();
    let (centrum_rows, centrum) = centrum_suite(&cfg);
    let centrum_took = start.elapsed();

    let mut cfg = SuiteConfig::new(100, SEED + 7);
    cfg.eps = Some(1.0);
    let start = Instant::now();
    let (_, ordered) = ordered_suite(&cfg);
    let ordered_took = start.elapsed();

    results.push((4, "dual certificates", certificates(&[&centrum, &ordered])));
    results.push((5, "centrum primal-dual", centrum_pd(&centrum_rows, &centrum, centrum_took)));
    results.push((6, "lp reduction", lp_reduce(&centrum_rows, centrum_took)));
    results.push((7, "general weights", general(&ordered, ordered_took)));
    results.push((8, "opening LP greedy", opening_lp()));
    results.push((9, "determinism", determinism()));

    let mut failed = 0;
    for (id, name, o) in &results {
        println!("criterion {id} {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += u32::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
