//! `haplo`: generate synthetic read matrices, solve them, and run benchmark
//! sweeps.
//!
//! Exit codes: 0 on success, 1 on a runtime failure, 2 on a usage error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use haplo_core::baselines::{altmin_factorize, frobenius_manifold_solve, ALTMIN_MAX_ITERS, ALTMIN_REL_TOL};
use haplo_core::bench::{self, Method, PSchedule, SweepSpec, TableFormat};
use haplo_core::datagen::{self, InstanceSpec};
use haplo_core::io as files;
use haplo_core::metrics::{haplotype_distance, mec, nmse};
use haplo_core::solver::{self, extract_haplotype, SolveResult};
use haplo_core::{GroundTruth, Haplotype, RankOneFactors, ReadMatrix, SolverConfig, SolverParams};

const READS_FILE: &str = "reads.txt";
const TRUTH_FILE: &str = "truth.txt";
const HAPLOTYPE_FILE: &str = "haplotype.txt";
const REPORT_FILE: &str = "report.json";

#[derive(Parser)]
#[command(name = "haplo", version, about = "Haplotype assembly by rank-one matrix completion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded synthetic instance (reads.txt, truth.txt) to a directory.
    Generate(GenerateArgs),
    /// Estimate the haplotype of a read matrix.
    Solve(SolveArgs),
    /// Run a benchmark sweep and print aggregate rows.
    Bench(BenchArgs),
    /// Score a haplotype against the truth.
    Eval(EvalArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    /// Per-entry observation probability.
    #[arg(long)]
    pd: f64,
    /// Fraction of observed entries with flipped sign.
    #[arg(long, default_value_t = 0.0)]
    err: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct SolverArgs {
    #[arg(long, default_value_t = 0.5)]
    gamma1: f64,
    #[arg(long, default_value_t = 2.0)]
    gamma2: f64,
    #[arg(long, default_value_t = 1.2)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha_bar: f64,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    #[arg(long, default_value_t = 1e-4)]
    armijo_sigma: f64,
    #[arg(long, default_value_t = 1e-6)]
    tau: f64,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    #[arg(long, default_value_t = 60)]
    max_backtracks: usize,
}

impl SolverArgs {
    fn params(&self) -> SolverParams {
        SolverParams {
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            p: self.p,
            alpha_bar: self.alpha_bar,
            beta: self.beta,
            sigma_armijo: self.armijo_sigma,
            tau: self.tau,
            max_iters: self.max_iters,
            max_backtracks: self.max_backtracks,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    reads: PathBuf,
    /// Ground truth; when given, the report includes accuracy metrics.
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long, default_value = "manifold-mec")]
    method: Method,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Fixed,
    Linear,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Gnuplot,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 250)]
    m: usize,
    #[arg(long, default_value_t = 300)]
    n: usize,
    /// Observation probabilities, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pd: Vec<f64>,
    /// Error ratios, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    err: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "manifold-mec,manifold-fro,altmin")]
    methods: Vec<Method>,
    /// Trial t uses instance seed `seed + t`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `linear` sets p from the error ratio (1.05 at 0.14 up to 1.2 at 0.28).
    #[arg(long, value_enum, default_value_t = ScheduleArg::Fixed)]
    p_schedule: ScheduleArg,
    #[arg(long, env = "HAPLO_JOBS", default_value_t = 1)]
    jobs: usize,
    /// Aggregate output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write one CSV row per trial to this file.
    #[arg(long)]
    per_trial: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    haplotype: PathBuf,
    /// Read matrix; when given, the MEC of the haplotype is reported too.
    #[arg(long)]
    reads: Option<PathBuf>,
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let outcome = match cli.command {
        Command::Generate(args) => cmd_generate(&args),
        Command::Solve(args) => cmd_solve(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Eval(args) => cmd_eval(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn load_reads(path: &Path) -> Result<ReadMatrix> {
    files::parse_read_matrix(&read_file(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_truth(path: &Path) -> Result<GroundTruth> {
    files::parse_ground_truth(&read_file(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_haplotype(path: &Path) -> Result<Haplotype> {
    files::parse_haplotype(&read_file(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_generate(args: &GenerateArgs) -> Result<(), Failure> {
    let spec = InstanceSpec {
        m: args.m,
        n: args.n,
        pd: args.pd,
        err_ratio: args.err,
        seed: args.seed,
    };
    spec.validate().map_err(usage)?;
    let inst = datagen::generate(&spec).context("generating instance")?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_file(&args.out.join(READS_FILE), &files::format_read_matrix(&inst.rm))?;
    write_file(&args.out.join(TRUTH_FILE), &files::format_ground_truth(&inst.gt))?;
    println!("observed: {}", inst.rm.observed());
    println!("errors: {}", inst.omega_e.len());
    if inst.seed != spec.seed {
        println!("seed: {} (nothing observed with {})", inst.seed, spec.seed);
    }
    Ok(())
}

fn solve_report(result: &SolveResult) -> Value {
    json!({
        "termination": format!("{:?}", result.termination),
        "converged": result.converged,
        "iterations": result.iterations,
        "final_cost": result.cost_trace.last(),
        "final_gradient_norm": result.final_gradient_norm,
        "sign_ties": result.sign_ties,
        "degenerate_retractions": result.degenerate_retractions,
        "sigma": result.x_final.sigma(),
        "cost_trace": result.cost_trace,
    })
}

fn cmd_solve(args: &SolveArgs) -> Result<(), Failure> {
    let cfg = SolverConfig::new(args.solver.params()).map_err(usage)?;
    let rm = load_reads(&args.reads)?;
    let truth = args.truth.as_deref().map(load_truth).transpose()?;
    if let Some(gt) = &truth {
        if (gt.rows(), gt.cols()) != rm.dims() {
            return Err(Failure::Runtime(anyhow::anyhow!(
                "truth is {}x{} but reads are {}x{}",
                gt.rows(),
                gt.cols(),
                rm.rows(),
                rm.cols()
            )));
        }
    }

    let (haplotype, estimate, mut report) = match args.method {
        Method::ManifoldMec => {
            let x0 = solver::initial_point(&rm).context("initial point")?;
            let check = solver::check_initialization(&rm, &x0, &cfg);
            if !check.admissible {
                return Err(Failure::Runtime(anyhow::anyhow!(
                    "inadmissible start: f(X0) = {} is not below |Omega| = {}",
                    check.f0,
                    check.omega_count
                )));
            }
            let result = solver::solve_from(&rm, x0, &cfg).context("solving")?;
            let mut report = solve_report(&result);
            report["initial_cost"] = json!(check.f0);
            report["observed"] = json!(check.omega_count);
            (result.haplotype.clone(), result.x_final.to_dense(), report)
        }
        Method::ManifoldFro => {
            let result = frobenius_manifold_solve(&rm, &cfg).context("solving")?;
            (
                result.haplotype.clone(),
                result.x_final.to_dense(),
                solve_report(&result),
            )
        }
        Method::Altmin => {
            let result = altmin_factorize(&rm, ALTMIN_MAX_ITERS, ALTMIN_REL_TOL).context("factorizing")?;
            let h = extract_haplotype(&RankOneFactors::from_outer(&result.u, &result.v).context("factorizing")?);
            let report = json!({
                "termination": if result.iterations < ALTMIN_MAX_ITERS { "Converged" } else { "MaxIters" },
                "iterations": result.iterations,
                "final_cost": result.objective(),
                "sign_ties": h.ties,
                "objective_trace": result.objective_trace,
            });
            (h.haplotype, result.to_dense(), report)
        }
    };
    report["method"] = json!(args.method.name());
    report["haplotype"] = json!(haplotype.values().iter().map(|s| s.as_i8()).collect::<Vec<_>>());
    report["mec"] = json!(mec(&rm, &haplotype).context("scoring")?);
    if let Some(gt) = &truth {
        report["hamming_distance"] = json!(haplotype_distance(&gt.h, &haplotype).context("scoring")?);
        report["nmse"] = json!(nmse(&gt.full_matrix(), &estimate).context("scoring")?);
    }

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_file(&args.out.join(HAPLOTYPE_FILE), &files::format_haplotype(&haplotype))?;
    let text = serde_json::to_string_pretty(&report).context("encoding report")?;
    write_file(&args.out.join(REPORT_FILE), &(text + "\n"))?;

    println!("termination: {}", report["termination"].as_str().unwrap_or("?"));
    println!("mec: {}", report["mec"]);
    if let Some(hd) = report.get("hamming_distance") {
        println!("hamming_distance: {hd}");
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> Result<(), Failure> {
    if args.jobs == 0 {
        return Err(usage(anyhow::anyhow!("--jobs must be at least 1")));
    }
    let spec = SweepSpec {
        m: args.m,
        n: args.n,
        pds: args.pd.clone(),
        err_ratios: args.err.clone(),
        trials: args.trials,
        methods: args.methods.clone(),
        base_seed: args.seed,
        params: args.solver.params(),
        p_schedule: match args.p_schedule {
            ScheduleArg::Fixed => PSchedule::Fixed,
            ScheduleArg::Linear => PSchedule::LINEAR_DEFAULT,
        },
    };
    spec.validate().map_err(usage)?;
    let out = bench::run_sweep(&spec, args.jobs).context("running sweep")?;
    let format = match args.format {
        FormatArg::Csv => TableFormat::Csv,
        FormatArg::Gnuplot => TableFormat::Gnuplot,
    };
    let mut table = Vec::new();
    bench::write_aggregate(&out.rows, format, &mut table).context("formatting")?;
    match &args.out {
        Some(path) => fs::write(path, &table).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().write_all(&table).context("writing stdout")?,
    }
    if let Some(path) = &args.per_trial {
        let mut rows = Vec::new();
        bench::write_trials_csv(&spec, &out.trials, &mut rows).context("formatting")?;
        fs::write(path, rows).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<(), Failure> {
    let gt = load_truth(&args.truth)?;
    let h = load_haplotype(&args.haplotype)?;
    let hd = haplotype_distance(&gt.h, &h).context("comparing haplotypes")?;
    println!("hamming_distance: {hd}");
    if let Some(path) = &args.reads {
        let rm = load_reads(path)?;
        println!("mec: {}", mec(&rm, &h).context("scoring")?);
    }
    Ok(())
}
