//! Command-line frontend for differential graph estimation.
//!
//! Subcommands cover the full workflow: `simulate` writes synthetic pairs
//! with known ground truth, `estimate` and `tune` recover a graph from CSV
//! data at a fixed or criterion-selected penalty level, `bench` runs Monte
//! Carlo benchmarks, `roc` sweeps operating characteristics against a
//! reference edge set, and `diagnose` reports sample-complexity constants.
//! Every command echoes its resolved configuration to `config.json` next to
//! its outputs. Exit codes: 0 on success, 1 on usage or input errors, 2 on
//! numerical failure.

mod io;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use specdiff_core::evaluation::{
    roc_sweep, run_benchmark, theory_diagnostics, BenchmarkReport, BenchmarkSpec, LambdaMode,
    TheoryConstants,
};
use specdiff_core::penalty::{PenaltyKind, PenaltySpec, DEFAULT_LOG_SUM_EPSILON, DEFAULT_SCAD_A};
use specdiff_core::solver::{estimate, AdmmDiagnostics, DifferentialEstimate, SolverConfig};
use specdiff_core::spectral::{
    build_grid, spectral_statistics, spectral_statistics_with_span, SpectralStatistics,
    TimeSeries,
};
use specdiff_core::synth::{gen_pair_with_truth, simulate, ProcessKind, SynthOptions};
use specdiff_core::tuning::{lambda_grid, select_lambda, time_domain_scale, BicScaling};

use io::{AppError, AppResult};

#[derive(Parser)]
#[command(
    name = "specdiff",
    version,
    about = "Estimates where the conditional-independence graphs of two stationary time series differ"
)]
struct Cli {
    /// Master random seed for synthetic data.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for parallel runs; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic model pair and write x.csv, y.csv, truth.json.
    Simulate(SimulateArgs),
    /// Estimate the differential graph at a fixed penalty level.
    Estimate(EstimateArgs),
    /// Estimate across a penalty grid and select the level by information
    /// criterion.
    Tune(TuneArgs),
    /// Monte Carlo benchmark over freshly simulated synthetic pairs.
    Bench(BenchArgs),
    /// True/false positive rates along a penalty sweep against a reference
    /// edge set.
    Roc(RocArgs),
    /// Sample-complexity constants of a synthetic model pair.
    Diagnose(DiagnoseArgs),
}

/// CSV inputs and preprocessing shared by estimate, tune, and roc.
#[derive(Args)]
struct InputArgs {
    /// CSV of the first sample; rows = time, columns = variables.
    #[arg(long)]
    x: PathBuf,

    /// CSV of the second sample, same orientation as --x.
    #[arg(long)]
    y: PathBuf,

    /// Input rows are variables and columns are time samples.
    #[arg(long)]
    transpose: bool,

    /// Skip one header row.
    #[arg(long)]
    header: bool,

    /// Replace each series by log returns ln z(t)/z(t-1).
    #[arg(long)]
    log_return: bool,

    /// Subtract the per-variable mean.
    #[arg(long)]
    center: bool,

    /// Divide by the per-variable sample standard deviation.
    #[arg(long)]
    standardize: bool,
}

/// Frequency-grid geometry.
#[derive(Args)]
struct GridArgs {
    /// Number of frequency blocks M.
    #[arg(long, default_value_t = 4)]
    blocks: usize,

    /// Smoothing span K per block (odd); defaults to the built-in rule.
    #[arg(long)]
    span: Option<usize>,
}

/// Penalty family and shape.
#[derive(Args)]
struct PenaltyArgs {
    /// Penalty family: lasso, logsum, or scad.
    #[arg(long, default_value = "logsum")]
    penalty: String,

    /// Shape parameter of the log-sum family.
    #[arg(long)]
    epsilon: Option<f64>,

    /// Concavity knot of the clipped family.
    #[arg(long)]
    scad_a: Option<f64>,
}

/// Solver overrides; unset values keep the defaults.
#[derive(Args)]
struct SolverArgs {
    /// Initial augmented-Lagrangian parameter.
    #[arg(long)]
    rho: Option<f64>,

    /// Residual imbalance ratio that triggers a step-size change.
    #[arg(long)]
    mu_bar: Option<f64>,

    /// Absolute floor of the stopping thresholds.
    #[arg(long)]
    tau_abs: Option<f64>,

    /// Relative term of the stopping thresholds.
    #[arg(long)]
    tau_rel: Option<f64>,

    /// Inner iteration cap.
    #[arg(long)]
    max_iter: Option<usize>,

    /// Reweighting passes for non-convex penalties.
    #[arg(long)]
    reweight_passes: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Process family: ar or ma.
    #[arg(long)]
    kind: String,

    /// Number of variables.
    #[arg(long)]
    p: usize,

    /// Observations per series.
    #[arg(long)]
    n: usize,

    /// Variables per cluster; defaults to the stock layout for p.
    #[arg(long)]
    block_size: Option<usize>,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    grid: GridArgs,

    #[command(flatten)]
    penalty: PenaltyArgs,

    #[command(flatten)]
    solver: SolverArgs,

    /// Penalty level.
    #[arg(long)]
    lambda: f64,

    /// Also write the per-frequency difference matrices as CSV.
    #[arg(long)]
    dump_delta: bool,
}

#[derive(Args)]
struct TuneArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    grid: GridArgs,

    #[command(flatten)]
    penalty: PenaltyArgs,

    #[command(flatten)]
    solver: SolverArgs,

    /// Also write the per-frequency difference matrices of the selected
    /// estimate as CSV.
    #[arg(long)]
    dump_delta: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Process family: ar or ma.
    #[arg(long)]
    kind: String,

    /// Number of variables.
    #[arg(long)]
    p: usize,

    /// Observations per simulated series.
    #[arg(long)]
    n: usize,

    /// Variables per cluster; defaults to the stock layout for p.
    #[arg(long)]
    block_size: Option<usize>,

    /// Monte Carlo runs.
    #[arg(long, default_value_t = 20)]
    runs: usize,

    /// Number of frequency blocks M.
    #[arg(long, default_value_t = 4)]
    blocks: usize,

    #[command(flatten)]
    penalty: PenaltyArgs,

    #[command(flatten)]
    solver: SolverArgs,

    /// Penalty selection: oracle (best F1 against truth) or bic.
    #[arg(long, default_value = "bic")]
    lambda_mode: String,
}

#[derive(Args)]
struct RocArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    grid: GridArgs,

    #[command(flatten)]
    penalty: PenaltyArgs,

    #[command(flatten)]
    solver: SolverArgs,

    /// JSON file with the reference edge set under an `edges` key.
    #[arg(long)]
    truth: PathBuf,

    /// Comma-separated penalty levels; defaults to the automatic grid.
    #[arg(long)]
    lambdas: Option<String>,
}

#[derive(Args)]
struct DiagnoseArgs {
    /// Process family: ar or ma.
    #[arg(long)]
    kind: String,

    /// Number of variables.
    #[arg(long)]
    p: usize,

    /// Sample size the constants refer to.
    #[arg(long)]
    n: usize,

    /// Variables per cluster; defaults to the stock layout for p.
    #[arg(long)]
    block_size: Option<usize>,

    /// Number of frequency blocks M.
    #[arg(long, default_value_t = 4)]
    blocks: usize,

    /// Smoothing span K per block (odd); defaults to the built-in rule.
    #[arg(long)]
    span: Option<usize>,

    /// Tail-order exponent of the concentration bound; must exceed 2.
    #[arg(long, default_value_t = 2.1)]
    tau: f64,

    #[command(flatten)]
    penalty: PenaltyArgs,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    if let Err(e) = std::fs::create_dir_all(&cli.out) {
        eprintln!("error: {}: {e}", cli.out.display());
        return 1;
    }
    let result = match &cli.command {
        Command::Simulate(args) => cmd_simulate(&cli, args),
        Command::Estimate(args) => cmd_estimate(&cli, args),
        Command::Tune(args) => cmd_tune(&cli, args),
        Command::Bench(args) => cmd_bench(&cli, args),
        Command::Roc(args) => cmd_roc(&cli, args),
        Command::Diagnose(args) => cmd_diagnose(&cli, args),
    };
    match result {
        Ok(()) => 0,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(AppError::Numerical(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn parse_kind(s: &str) -> AppResult<ProcessKind> {
    s.parse::<ProcessKind>().map_err(AppError::from)
}

fn synth_options(kind: ProcessKind, p: usize, block_size: Option<usize>) -> AppResult<SynthOptions<f64>> {
    let opts = match block_size {
        Some(b) => SynthOptions::with_block_size(kind, p, b)?,
        None => SynthOptions::standard(kind, p)?,
    };
    Ok(opts)
}

fn penalty_spec(args: &PenaltyArgs, lambda: f64) -> AppResult<PenaltySpec<f64>> {
    let kind: PenaltyKind = args.penalty.parse()?;
    let epsilon = args.epsilon.unwrap_or(DEFAULT_LOG_SUM_EPSILON);
    let scad_a = args.scad_a.unwrap_or(DEFAULT_SCAD_A);
    Ok(PenaltySpec::with_shape(kind, lambda, epsilon, scad_a)?)
}

fn solver_config(args: &SolverArgs) -> SolverConfig<f64> {
    let mut cfg = SolverConfig::default();
    if let Some(v) = args.rho {
        cfg.rho_init = v;
    }
    if let Some(v) = args.mu_bar {
        cfg.mu_bar = v;
    }
    if let Some(v) = args.tau_abs {
        cfg.tau_abs = v;
    }
    if let Some(v) = args.tau_rel {
        cfg.tau_rel = v;
    }
    if let Some(v) = args.max_iter {
        cfg.max_iterations = v;
    }
    if args.reweight_passes.is_some() {
        cfg.max_reweight_passes = args.reweight_passes;
    }
    cfg
}

/// Loads, preprocesses, and aligns the x/y pair of an input block,
/// reporting accumulated warnings on stderr.
fn load_pair(input: &InputArgs) -> AppResult<(TimeSeries<f64>, TimeSeries<f64>)> {
    let load_opts = io::LoadOptions {
        transpose: input.transpose,
        header: input.header,
    };
    let pre_opts = io::PreprocessOptions {
        log_return: input.log_return,
        center: input.center,
        standardize: input.standardize,
    };
    let mut warnings = Vec::new();
    let x = io::load_timeseries(&input.x, &load_opts, &mut warnings)?;
    let y = io::load_timeseries(&input.y, &load_opts, &mut warnings)?;
    let x = io::preprocess(x, &pre_opts, &mut warnings)?;
    let y = io::preprocess(y, &pre_opts, &mut warnings)?;
    let pair = io::align_pair(x, y, &mut warnings)?;
    io::report_warnings(&warnings);
    Ok(pair)
}

fn statistics(
    x: &TimeSeries<f64>,
    y: &TimeSeries<f64>,
    grid: &GridArgs,
) -> AppResult<SpectralStatistics<f64>> {
    let stats = match grid.span {
        Some(span) => spectral_statistics_with_span(x, y, grid.blocks, span)?,
        None => spectral_statistics(x, y, grid.blocks)?,
    };
    Ok(stats)
}

/// Echo of the preprocessing flags in `config.json`.
#[derive(Serialize)]
struct InputEcho {
    x: String,
    y: String,
    transpose: bool,
    header: bool,
    log_return: bool,
    center: bool,
    standardize: bool,
}

impl InputEcho {
    fn new(input: &InputArgs) -> Self {
        Self {
            x: input.x.display().to_string(),
            y: input.y.display().to_string(),
            transpose: input.transpose,
            header: input.header,
            log_return: input.log_return,
            center: input.center,
            standardize: input.standardize,
        }
    }
}

/// Echo of the resolved solver configuration in `config.json`.
#[derive(Serialize)]
struct SolverEcho {
    rho_init: f64,
    mu_bar: f64,
    tau_abs: f64,
    tau_rel: f64,
    max_iterations: usize,
    reweight_passes: Option<usize>,
}

impl SolverEcho {
    fn new(cfg: &SolverConfig<f64>) -> Self {
        Self {
            rho_init: cfg.rho_init,
            mu_bar: cfg.mu_bar,
            tau_abs: cfg.tau_abs,
            tau_rel: cfg.tau_rel,
            max_iterations: cfg.max_iterations,
            reweight_passes: cfg.max_reweight_passes,
        }
    }
}

/// Echo of the resolved penalty shape in `config.json`.
#[derive(Serialize)]
struct PenaltyEcho {
    penalty: String,
    epsilon: f64,
    scad_a: f64,
}

impl PenaltyEcho {
    fn new(spec: &PenaltySpec<f64>) -> Self {
        Self {
            penalty: spec.kind.as_str().to_string(),
            epsilon: spec.epsilon,
            scad_a: spec.scad_a,
        }
    }
}

#[derive(Serialize)]
struct SimulateConfig {
    command: &'static str,
    kind: &'static str,
    p: usize,
    n: usize,
    block_size: usize,
    seed: u64,
    out: String,
}

/// Contents of `truth.json`: the reference edge set with the averaged
/// inverse-spectrum difference it was thresholded from.
#[derive(Serialize)]
struct TruthFile {
    kind: &'static str,
    p: usize,
    n: usize,
    seed: u64,
    block_size: usize,
    edges: Vec<(usize, usize)>,
    /// Entrywise average of the absolute inverse-spectrum difference.
    d: Vec<Vec<f64>>,
    /// Largest entrywise average of the first inverse spectrum.
    b: f64,
    /// Relative threshold separating edges from background.
    tau: f64,
}

fn cmd_simulate(cli: &Cli, args: &SimulateArgs) -> AppResult<()> {
    let kind = parse_kind(&args.kind)?;
    let opts = synth_options(kind, args.p, args.block_size)?;
    let mut rng = ChaCha20Rng::seed_from_u64(cli.seed);
    let (mx, my, truth) = gen_pair_with_truth(&opts, &mut rng)?;
    let x = simulate(&mx, args.n, &mut rng)?;
    let y = simulate(&my, args.n, &mut rng)?;
    io::write_series_csv(&cli.out.join("x.csv"), &x)?;
    io::write_series_csv(&cli.out.join("y.csv"), &y)?;
    let p = args.p;
    let d = (0..p)
        .map(|i| (0..p).map(|j| truth.avg_difference.get(i, j)).collect())
        .collect();
    let truth_file = TruthFile {
        kind: kind.as_str(),
        p,
        n: args.n,
        seed: cli.seed,
        block_size: opts.block_size,
        edges: truth.edges.clone(),
        d,
        b: truth.scale,
        tau: truth.threshold,
    };
    io::write_json(&cli.out.join("truth.json"), &truth_file)?;
    let config = SimulateConfig {
        command: "simulate",
        kind: kind.as_str(),
        p,
        n: args.n,
        block_size: opts.block_size,
        seed: cli.seed,
        out: cli.out.display().to_string(),
    };
    io::write_json(&cli.out.join("config.json"), &config)?;
    println!(
        "wrote x.csv, y.csv, truth.json to {} (p = {p}, n = {}, true edges = {})",
        cli.out.display(),
        args.n,
        truth_file.edges.len()
    );
    Ok(())
}

#[derive(Serialize)]
struct EstimateConfig {
    command: &'static str,
    input: InputEcho,
    blocks: usize,
    span: Option<usize>,
    penalty: PenaltyEcho,
    lambda: f64,
    solver: SolverEcho,
    dump_delta: bool,
    out: String,
}

/// Per-pass solver diagnostics in `metrics.json`.
#[derive(Serialize)]
struct PassMetrics {
    iterations: usize,
    converged: bool,
    primal_residual: f64,
    dual_residual: f64,
    tau_primal: f64,
    tau_dual: f64,
    final_rho: f64,
}

impl PassMetrics {
    fn new(d: &AdmmDiagnostics<f64>) -> Self {
        Self {
            iterations: d.iterations,
            converged: d.converged,
            primal_residual: d.primal_residual,
            dual_residual: d.dual_residual,
            tau_primal: d.tau_primal,
            tau_dual: d.tau_dual,
            final_rho: d.final_rho,
        }
    }
}

#[derive(Serialize)]
struct EstimateMetrics {
    converged: bool,
    passes: Vec<PassMetrics>,
}

fn emit_estimate_outputs(
    out: &std::path::Path,
    est: &DifferentialEstimate<f64>,
    stats: &SpectralStatistics<f64>,
    penalty: &PenaltySpec<f64>,
    lambda: f64,
    dump_delta: bool,
) -> AppResult<io::EdgesFile> {
    let edges = io::edges_file(
        est,
        stats.grid.blocks,
        stats.grid.span,
        penalty.kind.as_str(),
        lambda,
    );
    io::write_json(&out.join("edges.json"), &edges)?;
    if dump_delta {
        io::write_delta_csvs(out, est)?;
    }
    Ok(edges)
}

fn cmd_estimate(cli: &Cli, args: &EstimateArgs) -> AppResult<()> {
    let (x, y) = load_pair(&args.input)?;
    let stats = statistics(&x, &y, &args.grid)?;
    let penalty = penalty_spec(&args.penalty, args.lambda)?;
    let cfg = solver_config(&args.solver);
    let (est, diags) = estimate(&stats, &penalty, &cfg)?;
    let edges = emit_estimate_outputs(&cli.out, &est, &stats, &penalty, args.lambda, args.dump_delta)?;
    let metrics = EstimateMetrics {
        converged: est.converged,
        passes: diags.iter().map(PassMetrics::new).collect(),
    };
    io::write_json(&cli.out.join("metrics.json"), &metrics)?;
    let config = EstimateConfig {
        command: "estimate",
        input: InputEcho::new(&args.input),
        blocks: args.grid.blocks,
        span: args.grid.span,
        penalty: PenaltyEcho::new(&penalty),
        lambda: args.lambda,
        solver: SolverEcho::new(&cfg),
        dump_delta: args.dump_delta,
        out: cli.out.display().to_string(),
    };
    io::write_json(&cli.out.join("config.json"), &config)?;
    println!(
        "p = {}, m = {}, k = {}, lambda = {}: {} edges, converged = {}",
        edges.p,
        edges.m,
        edges.k,
        args.lambda,
        edges.edges.len(),
        est.converged
    );
    Ok(())
}

#[derive(Serialize)]
struct TuneConfig {
    command: &'static str,
    input: InputEcho,
    blocks: usize,
    span: Option<usize>,
    penalty: PenaltyEcho,
    solver: SolverEcho,
    dump_delta: bool,
    out: String,
}

/// Grid and criterion trace of a tuning run in `metrics.json`.
#[derive(Serialize)]
struct TuneMetrics {
    lambda_grid: Vec<f64>,
    lambda_sm: f64,
    degenerate: bool,
    bic_trace: Vec<f64>,
    lambda_star: f64,
    index: usize,
}

fn cmd_tune(cli: &Cli, args: &TuneArgs) -> AppResult<()> {
    let (x, y) = load_pair(&args.input)?;
    let stats = statistics(&x, &y, &args.grid)?;
    let penalty = penalty_spec(&args.penalty, 1.0)?;
    let cfg = solver_config(&args.solver);
    let grid = lambda_grid(&stats, &penalty, &cfg)?;
    let scale = time_domain_scale(&x);
    let selection = select_lambda(&stats, &penalty, &cfg, &grid, &scale, BicScaling::Symmetric)?;
    let edges = emit_estimate_outputs(
        &cli.out,
        &selection.estimate,
        &stats,
        &penalty,
        selection.lambda_star,
        args.dump_delta,
    )?;
    let metrics = TuneMetrics {
        lambda_grid: grid.values.clone(),
        lambda_sm: grid.lambda_sm,
        degenerate: grid.degenerate,
        bic_trace: selection.bic_trace.clone(),
        lambda_star: selection.lambda_star,
        index: selection.index,
    };
    io::write_json(&cli.out.join("metrics.json"), &metrics)?;
    let config = TuneConfig {
        command: "tune",
        input: InputEcho::new(&args.input),
        blocks: args.grid.blocks,
        span: args.grid.span,
        penalty: PenaltyEcho::new(&penalty),
        solver: SolverEcho::new(&cfg),
        dump_delta: args.dump_delta,
        out: cli.out.display().to_string(),
    };
    io::write_json(&cli.out.join("config.json"), &config)?;
    println!(
        "selected lambda = {} (level {} of {}): {} edges",
        selection.lambda_star,
        selection.index + 1,
        grid.values.len(),
        edges.edges.len()
    );
    Ok(())
}

#[derive(Serialize)]
struct BenchConfig {
    command: &'static str,
    kind: &'static str,
    p: usize,
    n: usize,
    block_size: usize,
    runs: usize,
    blocks: usize,
    penalty: PenaltyEcho,
    solver: SolverEcho,
    lambda_mode: LambdaMode,
    seed: u64,
    out: String,
}

/// Contents of `bench.json`: the scenario next to its aggregated report.
#[derive(Serialize)]
struct BenchFile {
    kind: &'static str,
    p: usize,
    n: usize,
    blocks: usize,
    penalty: String,
    lambda_mode: LambdaMode,
    seed: u64,
    report: BenchmarkReport,
}

fn bench_csv(file: &BenchFile) -> String {
    let r = &file.report;
    let mut text = String::from(
        "kind,p,n,m,penalty,lambda_mode,requested_runs,completed_runs,excluded_runs,\
         f1_mean,f1_std,precision_mean,recall_mean,hamming_mean,hamming_std,\
         normalized_hamming_mean,normalized_hamming_std,seconds_mean,seconds_median\n",
    );
    text.push_str(&format!(
        "{},{},{},{},{},{},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
        file.kind,
        file.p,
        file.n,
        file.blocks,
        file.penalty,
        file.lambda_mode,
        r.requested_runs,
        r.completed_runs,
        r.excluded_runs,
        r.f1_mean,
        r.f1_std,
        r.precision_mean,
        r.recall_mean,
        r.hamming_mean,
        r.hamming_std,
        r.normalized_hamming_mean,
        r.normalized_hamming_std,
        r.seconds_mean,
        r.seconds_median,
    ));
    text
}

fn cmd_bench(cli: &Cli, args: &BenchArgs) -> AppResult<()> {
    let kind = parse_kind(&args.kind)?;
    let options = synth_options(kind, args.p, args.block_size)?;
    let block_size = options.block_size;
    let penalty = penalty_spec(&args.penalty, 1.0)?;
    let cfg = solver_config(&args.solver);
    let lambda_mode: LambdaMode = args.lambda_mode.parse()?;
    let spec = BenchmarkSpec {
        kind,
        p: args.p,
        n: args.n,
        blocks: args.blocks,
        penalty: penalty.clone(),
        cfg: cfg.clone(),
        runs: args.runs,
        seed: cli.seed,
        lambda_mode,
        options: Some(options),
    };
    let report = run_benchmark(&spec)?;
    io::report_warnings(&report.warnings);
    let file = BenchFile {
        kind: kind.as_str(),
        p: args.p,
        n: args.n,
        blocks: args.blocks,
        penalty: penalty.kind.as_str().to_string(),
        lambda_mode,
        seed: cli.seed,
        report,
    };
    io::write_json(&cli.out.join("bench.json"), &file)?;
    std::fs::write(cli.out.join("bench.csv"), bench_csv(&file))
        .map_err(|e| AppError::Usage(format!("{}: {e}", cli.out.join("bench.csv").display())))?;
    let config = BenchConfig {
        command: "bench",
        kind: kind.as_str(),
        p: args.p,
        n: args.n,
        block_size,
        runs: args.runs,
        blocks: args.blocks,
        penalty: PenaltyEcho::new(&penalty),
        solver: SolverEcho::new(&cfg),
        lambda_mode,
        seed: cli.seed,
        out: cli.out.display().to_string(),
    };
    io::write_json(&cli.out.join("config.json"), &config)?;
    println!(
        "{} p = {} n = {} {} ({}): f1 = {:.3} +/- {:.3} over {} runs ({} excluded)",
        kind.as_str(),
        args.p,
        args.n,
        file.penalty,
        lambda_mode,
        file.report.f1_mean,
        file.report.f1_std,
        file.report.completed_runs,
        file.report.excluded_runs,
    );
    Ok(())
}

#[derive(Serialize)]
struct RocConfig {
    command: &'static str,
    input: InputEcho,
    blocks: usize,
    span: Option<usize>,
    penalty: PenaltyEcho,
    solver: SolverEcho,
    truth: String,
    lambdas: Vec<f64>,
    out: String,
}

fn cmd_roc(cli: &Cli, args: &RocArgs) -> AppResult<()> {
    let (x, y) = load_pair(&args.input)?;
    let stats = statistics(&x, &y, &args.grid)?;
    let penalty = penalty_spec(&args.penalty, 1.0)?;
    let cfg = solver_config(&args.solver);
    let truth = io::load_truth_edges(&args.truth)?;
    let lambdas: Vec<f64> = match &args.lambdas {
        Some(list) => list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| AppError::Usage(format!("invalid penalty level '{}'", s.trim())))
            })
            .collect::<AppResult<_>>()?,
        None => lambda_grid(&stats, &penalty, &cfg)?.values,
    };
    let points = roc_sweep(&stats, &penalty, &cfg, &truth, &lambdas)?;
    let mut csv = String::from("lambda,fpr,tpr\n");
    for pt in &points {
        csv.push_str(&format!(
            "{:.16e},{:.16e},{:.16e}\n",
            pt.lambda, pt.fpr, pt.tpr
        ));
    }
    std::fs::write(cli.out.join("roc.csv"), csv)
        .map_err(|e| AppError::Usage(format!("{}: {e}", cli.out.join("roc.csv").display())))?;
    let config = RocConfig {
        command: "roc",
        input: InputEcho::new(&args.input),
        blocks: args.grid.blocks,
        span: args.grid.span,
        penalty: PenaltyEcho::new(&penalty),
        solver: SolverEcho::new(&cfg),
        truth: args.truth.display().to_string(),
        lambdas,
        out: cli.out.display().to_string(),
    };
    io::write_json(&cli.out.join("config.json"), &config)?;
    println!("wrote roc.csv with {} points", points.len());
    Ok(())
}

#[derive(Serialize)]
struct DiagnoseConfig {
    command: &'static str,
    kind: &'static str,
    p: usize,
    n: usize,
    block_size: usize,
    blocks: usize,
    span: usize,
    tau: f64,
    penalty: PenaltyEcho,
    seed: u64,
    out: String,
}

/// Contents of `diagnostics.json`: the scenario next to its constants.
#[derive(Serialize)]
struct DiagnosticsFile {
    kind: &'static str,
    p: usize,
    n: usize,
    blocks: usize,
    span: usize,
    /// True edge count of the generated pair.
    s: usize,
    tau: f64,
    seed: u64,
    penalty: String,
    constants: TheoryConstants,
}

fn cmd_diagnose(cli: &Cli, args: &DiagnoseArgs) -> AppResult<()> {
    let kind = parse_kind(&args.kind)?;
    let options = synth_options(kind, args.p, args.block_size)?;
    let block_size = options.block_size;
    let penalty = penalty_spec(&args.penalty, 1.0)?;
    let mut rng = ChaCha20Rng::seed_from_u64(cli.seed);
    let (mx, my, truth) = gen_pair_with_truth(&options, &mut rng)?;
    let span = match args.span {
        Some(span) => span,
        None => build_grid::<f64>(args.n, args.blocks)?.span,
    };
    let s = truth.edges.len();
    let constants = theory_diagnostics(&mx, &my, args.n, args.blocks, span, s, args.tau, &penalty)?;
    let file = DiagnosticsFile {
        kind: kind.as_str(),
        p: args.p,
        n: args.n,
        blocks: args.blocks,
        span,
        s,
        tau: args.tau,
        seed: cli.seed,
        penalty: penalty.kind.as_str().to_string(),
        constants,
    };
    io::write_json(&cli.out.join("diagnostics.json"), &file)?;
    let config = DiagnoseConfig {
        command: "diagnose",
        kind: kind.as_str(),
        p: args.p,
        n: args.n,
        block_size,
        blocks: args.blocks,
        span,
        tau: args.tau,
        penalty: PenaltyEcho::new(&penalty),
        seed: cli.seed,
        out: cli.out.display().to_string(),
    };
    io::write_json(&cli.out.join("config.json"), &config)?;
    println!(
        "wrote diagnostics.json (s = {s}, nu = {:.6}, n1..n4 = {}, {}, {}, {})",
        file.constants.nu,
        file.constants.n1,
        file.constants.n2,
        file.constants.n3,
        file.constants.n4
    );
    Ok(())
}
