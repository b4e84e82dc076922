use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use okmedian::error::{CliError, CliResult};
use okmedian::format::{load_weights, read_instance, write_instance, InstanceBody, InstanceFile};
use okmedian::report::{join_indices, Format, ReportWriter};
use okmedian::solve::{solve, Algorithm, SolveOptions};
use okmedian::suites::{run_suite, Suite, SuiteConfig};
use okmedian_core::instance::{gen_points, gen_random_metric, metric_from_points};
use okmedian_core::oracle::{brute_force_ordered, DEFAULT_CAP};
use okmedian_core::ordered::DEFAULT_GUESS_CAP;
use serde::Serialize;

/// Ordered k-median and ℓ-centrum solvers on explicit finite metrics.
#[derive(Parser)]
#[command(name = "okmedian", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance file.
    Gen(GenArgs),
    /// Solve one instance and print a report record.
    Solve(SolveArgs),
    /// Run a verification suite and print per-trial rows and a summary.
    Bench(BenchArgs),
    /// Exact optimum by exhaustive search.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Euclidean,
    Random,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    kind: Kind,
    /// Coordinate dimension (euclidean only).
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Coordinate range or largest random distance.
    #[arg(long, default_value_t = 10.0)]
    scale: f64,
    /// Output path; `-` for stdout.
    #[arg(long, default_value = "-")]
    out: PathBuf,
}

#[derive(Args)]
struct Common {
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Weight file, or inline weights such as `centrum 2` or `3 2 1 1`.
    #[arg(long)]
    weights: String,
    /// Accuracy parameter; defaults to 0.1 for the ℓ-centrum pipelines and 1
    /// for general weights.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, value_enum, default_value_t = Algorithm::Auto)]
    algorithm: Algorithm,
    /// Try every budget on the grid instead of solving for it with LPs.
    #[arg(long)]
    scan_b: bool,
    /// Compare against the exhaustive optimum and audit every dual run.
    #[arg(long)]
    oracle_check: bool,
    /// k-median routine for `lp-reduce`: `lagrangian` or `brute-force`.
    #[arg(long, default_value = "lagrangian")]
    kmedian: String,
    #[arg(long, default_value_t = DEFAULT_GUESS_CAP)]
    guess_cap: u128,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    oracle_cap: u128,
    /// Accepted for symmetry with `bench`; the solvers are deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Leave the elapsed column empty, for byte-comparable records.
    #[arg(long)]
    no_elapsed: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Overrides the suite default (0.1 for centrum, 1 for ordered).
    #[arg(long)]
    epsilon: Option<f64>,
    /// k-median routine for the LP-reduction pipeline.
    #[arg(long, default_value = "brute-force")]
    kmedian: String,
    /// Report path; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    weights: String,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u128,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
}

#[derive(Serialize)]
struct OracleRecord {
    opt: f64,
    centers: String,
    sorted_costs: String,
}

fn pool(threads: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| CliError::Usage(e.to_string()))
}

fn cmd_gen(a: GenArgs) -> CliResult<()> {
    let file = match a.kind {
        Kind::Random => InstanceFile { instance: gen_random_metric(a.n, a.k, a.seed, a.scale)?, body: InstanceBody::Matrix },
        Kind::Euclidean => {
            let coords = gen_points(a.n, a.seed, a.dim, a.scale)?;
            InstanceFile { instance: metric_from_points(&coords, a.k)?, body: InstanceBody::Points(coords) }
        }
    };
    let text = write_instance(&file);
    if a.out.as_os_str() == "-" {
        io::stdout().write_all(text.as_bytes())?;
    } else {
        fs::write(&a.out, text)?;
    }
    Ok(())
}

fn cmd_solve(a: SolveArgs) -> CliResult<()> {
    let file = read_instance(&a.instance)?;
    let inst = file.instance;
    let w = load_weights(&a.weights, inst.n())?;
    let general = match a.algorithm {
        Algorithm::General => true,
        Algorithm::Auto => w.centrum_size().is_none(),
        _ => false,
    };
    let opts = SolveOptions {
        algorithm: a.algorithm,
        eps: a.epsilon.unwrap_or(if general { 1.0 } else { 0.1 }),
        scan_b: a.scan_b,
        oracle_check: a.oracle_check,
        kmedian: a.kmedian,
        guess_cap: a.guess_cap,
        oracle_cap: a.oracle_cap,
        record_elapsed: !a.no_elapsed,
    };
    let record = pool(a.common.threads)?.install(|| solve(&inst, &w, &opts))?;
    let mut out = ReportWriter::new(a.common.format, io::stdout().lock());
    out.row("solve", &record)?;
    let _ = out.finish()?;
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> CliResult<()> {
    let cfg = SuiteConfig { trials: a.trials, seed: a.seed, eps: a.epsilon, kmedian: a.kmedian };
    let start = Instant::now();
    let summary = pool(a.common.threads)?.install(|| -> CliResult<_> {
        match &a.out {
            Some(path) => {
                let file = io::BufWriter::new(fs::File::create(path)?);
                Ok(run_suite(a.suite, &cfg, a.common.format, file)?.0)
            }
            None => Ok(run_suite(a.suite, &cfg, a.common.format, io::stdout().lock())?.0),
        }
    })?;
    eprintln!(
        "{} trials, {} checks, {} violations in {:.2}s",
        summary.trials,
        summary.checks,
        summary.violations,
        start.elapsed().as_secs_f64()
    );
    if summary.violations > 0 {
        return Err(CliError::Violation(format!("{} violations", summary.violations)));
    }
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> CliResult<()> {
    let inst = read_instance(&a.instance)?.instance;
    let w = load_weights(&a.weights, inst.n())?;
    let (sol, sorted) = brute_force_ordered(&inst, &w, a.cap)?;
    let record = OracleRecord {
        opt: sol.cost.unwrap_or(0.0),
        centers: join_indices(&sol.centers),
        sorted_costs: sorted.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
    };
    let mut out = ReportWriter::new(a.format, io::stdout().lock());
    out.row("oracle", &record)?;
    let _ = out.finish()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Oracle(a) => cmd_oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
