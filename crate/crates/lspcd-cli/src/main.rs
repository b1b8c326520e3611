//! Command-line toolkit for polarized community discovery: generate
//! synthetic benchmarks, solve, evaluate, sweep parameter grids, and
//! benchmark the solver implementations.
//!
//! Exit codes: 0 success (and solver converged), 2 usage error, 3 input
//! error, 4 step budget exhausted before convergence.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use lspcd::assignment::Assignment;
use lspcd::graph::{parse_edge_list, AsymmetryPolicy, DuplicatePolicy, ParseOptions, SignedGraph};
use lspcd::metrics::quality_report;
use lspcd::objective::ObjectiveParams;
use lspcd::runner;
use lspcd::solver::{solve, Convergence, InitMode, SolveResultJson, SolverConfig, Variant};
use lspcd::ssbm::{generate, SsbmParams};

const EXIT_USAGE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_BUDGET: u8 = 4;

/// Marker for command-line misuse beyond what clap validates; exits 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

macro_rules! usage_bail {
    ($($arg:tt)*) => {
        return Err(UsageError(format!($($arg)*)).into())
    };
}

#[derive(Parser)]
#[command(
    name = "lspcd",
    version,
    about = "Polarized community discovery in signed networks"
)]
struct Cli {
    /// Bound concurrency of sweep and bench cells (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a planted-community benchmark graph and its ground truth.
    Generate(GenerateArgs),
    /// Run local search on an edge-list graph.
    Solve(SolveArgs),
    /// Evaluate a labels file against a graph (and optionally a ground truth).
    Eval(EvalArgs),
    /// Run a parameter grid of generate+solve+eval cells into a CSV.
    Sweep(SweepArgs),
    /// Time the three solver implementations on one generated graph.
    Bench(BenchArgs),
}

/// Seed fallback: the PCD_SEED environment variable, then 0.
fn default_seed() -> u64 {
    std::env::var("PCD_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: u32,
    /// Per-cluster planted size (total planted stays k*ell under --rho).
    #[arg(long)]
    ell: u64,
    /// Noise level in [0, 1].
    #[arg(long)]
    eta: f64,
    /// Largest-to-smallest planted size ratio (1 = balanced).
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// Writes <prefix>.edges and <prefix>.truth.csv.
    #[arg(long)]
    out_prefix: PathBuf,
}

#[derive(Args, Clone)]
struct ParseArgs {
    /// Smallest vertex id used by the input file (0 or 1).
    #[arg(long, default_value_t = 0)]
    index_base: u32,
    /// Repeated ordered pair handling: error | sum.
    #[arg(long, default_value = "error")]
    duplicates: String,
    /// Conflicting orientation handling: error | sum-then-halve.
    #[arg(long, default_value = "error")]
    asymmetry: String,
    /// Force the vertex count (allows trailing isolated vertices).
    #[arg(long)]
    n_override: Option<usize>,
}

impl ParseArgs {
    fn to_options(&self) -> Result<ParseOptions> {
        let duplicate_policy = match self.duplicates.as_str() {
            "error" => DuplicatePolicy::Error,
            "sum" => DuplicatePolicy::Sum,
            other => usage_bail!("unknown duplicate policy `{other}` (use error | sum)"),
        };
        let asymmetry_policy = match self.asymmetry.as_str() {
            "error" => AsymmetryPolicy::Error,
            "sum-then-halve" => AsymmetryPolicy::SumThenHalve,
            other => usage_bail!("unknown asymmetry policy `{other}` (use error | sum-then-halve)"),
        };
        if self.index_base > 1 {
            usage_bail!("index base must be 0 or 1");
        }
        Ok(ParseOptions {
            index_base: self.index_base,
            duplicate_policy,
            asymmetry_policy,
            comment_prefix: '#',
            n_override: self.n_override,
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Edge-list file.
    graph: PathBuf,
    #[arg(long)]
    k: u32,
    /// Inter-cluster weight; `auto` means 1/(k-1).
    #[arg(long, default_value = "auto")]
    alpha: String,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// naive | gradient_direct | lspcd
    #[arg(long, default_value = "lspcd")]
    variant: Variant,
    #[arg(long, default_value_t = u64::MAX)]
    max_steps: u64,
    /// window-then-sweep | sweep-only
    #[arg(long, default_value = "window-then-sweep")]
    convergence: Convergence,
    /// uniform-with-neutral | non-neutral-only
    #[arg(long, default_value = "uniform-with-neutral")]
    init: InitMode,
    /// Duality-gap sampling interval in steps (0 = off).
    #[arg(long, default_value_t = 0)]
    track_gap_every: u64,
    /// Result JSON path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the labels as `vertex,label` CSV.
    #[arg(long)]
    labels_out: Option<PathBuf>,
    #[command(flatten)]
    parse: ParseArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Labels file: JSON (`{"k":..,"labels":[..]}`) or `vertex,label` CSV.
    #[arg(long)]
    labels: PathBuf,
    /// Optional ground-truth labels file (same formats).
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Inter-cluster weight for polarity; `auto` means 1/(k-1).
    #[arg(long, default_value = "auto")]
    alpha: String,
    /// Imbalance-factor exponent; 1, 3, and 4 are the usual presets.
    #[arg(long, default_value_t = 3.0)]
    xi: f64,
    /// Cluster count override for CSV labels files.
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    parse: ParseArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Swept parameter, `name=v1,v2,...`; repeatable. Axis names:
    /// eta, beta, alpha, k, rho, seed.
    #[arg(long = "axis")]
    axes: Vec<String>,
    #[arg(long, default_value_t = 1)]
    repeats: u64,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    ell: u64,
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Fixed alpha; `auto` means 1/(k-1).
    #[arg(long, default_value = "auto")]
    alpha: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = u64::MAX)]
    max_steps: u64,
    #[arg(long, default_value_t = 3.0)]
    xi: f64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: u32,
    /// Planted size; defaults to n/(k+1).
    #[arg(long)]
    ell: Option<u64>,
    #[arg(long)]
    eta: f64,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long)]
    seed: Option<u64>,
    /// `auto` means 1/(k-1).
    #[arg(long, default_value = "auto")]
    alpha: String,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    #[arg(long, default_value_t = 3)]
    runs: usize,
    #[arg(long, default_value_t = u64::MAX)]
    max_steps: u64,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn resolve_alpha(spec: &str, k: u32) -> Result<f64> {
    if spec == "auto" {
        return Ok(ObjectiveParams::default_alpha(k));
    }
    let alpha: f64 = spec
        .parse()
        .with_context(|| format!("alpha must be `auto` or a number, got `{spec}`"))?;
    if !alpha.is_finite() {
        usage_bail!("alpha must be finite, got `{spec}`");
    }
    Ok(alpha)
}

fn check_finite(name: &str, value: f64) -> Result<()> {
    if !value.is_finite() {
        usage_bail!("{name} must be finite, got {value}");
    }
    Ok(())
}

fn load_graph(path: &Path, opts: &ParseOptions) -> Result<SignedGraph> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    parse_edge_list(BufReader::new(file), opts)
        .with_context(|| format!("while parsing {}", path.display()))
}

fn load_labels(path: &Path, k_override: Option<u32>) -> Result<Assignment> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut reader = BufReader::new(file);
    let looks_like_json = {
        let buf = reader.fill_buf()?;
        buf.iter().copied().find(|b| !b.is_ascii_whitespace()) == Some(b'{')
    };
    let parsed = if looks_like_json {
        Assignment::read_json(reader)
    } else {
        Assignment::read_csv(reader, k_override)
    };
    parsed.with_context(|| format!("while reading labels from {}", path.display()))
}

fn write_output(out: Option<&Path>, payload: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, payload)
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => println!("{payload}"),
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cmd_generate(args: &GenerateArgs) -> Result<ExitCode> {
    let params = SsbmParams {
        n: args.n,
        k: args.k,
        ell: args.ell,
        eta: args.eta,
        rho: args.rho,
        seed: args.seed.unwrap_or_else(default_seed),
    };
    let (graph, truth) = generate(&params)?;
    let edges_path = PathBuf::from(format!("{}.edges", args.out_prefix.display()));
    let truth_path = PathBuf::from(format!("{}.truth.csv", args.out_prefix.display()));
    let mut edges_out = BufWriter::new(
        File::create(&edges_path)
            .with_context(|| format!("cannot write {}", edges_path.display()))?,
    );
    graph.write_canonical(&mut edges_out)?;
    edges_out.flush()?;
    let mut truth_out = BufWriter::new(
        File::create(&truth_path)
            .with_context(|| format!("cannot write {}", truth_path.display()))?,
    );
    truth.write_csv(&mut truth_out)?;
    truth_out.flush()?;
    eprintln!(
        "wrote {} ({} vertices, {} edges) and {}",
        edges_path.display(),
        graph.n(),
        graph.edge_count(),
        truth_path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(args: &SolveArgs) -> Result<ExitCode> {
    let graph = load_graph(&args.graph, &args.parse.to_options()?)?;
    let alpha = resolve_alpha(&args.alpha, args.k)?;
    check_finite("beta", args.beta)?;
    let cfg = SolverConfig {
        k: args.k,
        params: ObjectiveParams::new(alpha, args.beta),
        seed: args.seed.unwrap_or_else(default_seed),
        variant: args.variant,
        max_steps: args.max_steps,
        convergence: args.convergence,
        init: args.init,
        track_gap_every: args.track_gap_every,
        ..SolverConfig::new(args.k)
    };
    let (assignment, report) = solve(&graph, &cfg)?;
    let result = SolveResultJson::new(&graph, &cfg, &assignment, &report);
    write_output(args.out.as_deref(), &serde_json::to_string_pretty(&result)?)?;
    if let Some(path) = &args.labels_out {
        let mut out = BufWriter::new(
            File::create(path).with_context(|| format!("cannot write {}", path.display()))?,
        );
        assignment.write_csv(&mut out)?;
        out.flush()?;
    }
    if report.converged {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "step budget ({}) exhausted before convergence",
            cfg.max_steps
        );
        Ok(ExitCode::from(EXIT_BUDGET))
    }
}

fn cmd_eval(args: &EvalArgs) -> Result<ExitCode> {
    let graph = load_graph(&args.graph, &args.parse.to_options()?)?;
    let labels = load_labels(&args.labels, args.k)?;
    let truth = args
        .truth
        .as_deref()
        .map(|p| load_labels(p, None))
        .transpose()?;
    let alpha = resolve_alpha(&args.alpha, labels.k())?;
    let report = quality_report(&graph, &labels, alpha, args.xi, truth.as_ref())?;
    write_output(args.out.as_deref(), &serde_json::to_string_pretty(&report)?)?;
    Ok(ExitCode::SUCCESS)
}

/// Axis order is fixed so the cell enumeration (and the CSV row order) does
/// not depend on flag order.
const AXIS_NAMES: [&str; 6] = ["eta", "beta", "alpha", "k", "rho", "seed"];

#[derive(Clone, Copy)]
struct SweepCell {
    eta: f64,
    beta: f64,
    alpha: Option<f64>, // None = auto for the cell's k
    k: u32,
    rho: f64,
    seed: u64,
}

fn parse_axes(args: &SweepArgs) -> Result<Vec<(usize, Vec<f64>)>> {
    if args.axes.is_empty() {
        usage_bail!("at least one --axis is required (e.g. --axis eta=0.1,0.2)");
    }
    let mut axes: Vec<(usize, Vec<f64>)> = Vec::new();
    for spec in &args.axes {
        let (name, list) = spec
            .split_once('=')
            .with_context(|| format!("bad axis `{spec}`: expected name=v1,v2,..."))?;
        let idx = AXIS_NAMES
            .iter()
            .position(|&n| n == name)
            .with_context(|| format!("unknown axis `{name}` (one of {AXIS_NAMES:?})"))?;
        if axes.iter().any(|&(i, _)| i == idx) {
            usage_bail!("axis `{name}` given twice");
        }
        let values: Vec<f64> = list
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .with_context(|| format!("bad value `{v}` for axis `{name}`"))
            })
            .collect::<Result<_>>()?;
        if values.is_empty() {
            usage_bail!("axis `{name}` has no values");
        }
        axes.push((idx, values));
    }
    axes.sort_by_key(|&(i, _)| i);
    Ok(axes)
}

fn cmd_sweep(args: &SweepArgs) -> Result<ExitCode> {
    if args.repeats < 1 {
        usage_bail!("--repeats must be at least 1");
    }
    let axes = parse_axes(args)?;
    check_finite("beta", args.beta)?;
    for (axis, values) in &axes {
        for &v in values {
            check_finite(AXIS_NAMES[*axis], v)?;
        }
    }
    let fixed_alpha = if args.alpha == "auto" {
        None
    } else {
        Some(resolve_alpha(&args.alpha, args.k)?)
    };
    let base = SweepCell {
        eta: args.eta,
        beta: args.beta,
        alpha: fixed_alpha,
        k: args.k,
        rho: args.rho,
        seed: args.seed.unwrap_or_else(default_seed),
    };
    let mut cells = vec![base];
    for (axis, values) in &axes {
        cells = cells
            .into_iter()
            .flat_map(|cell| {
                values.iter().map(move |&v| {
                    let mut c = cell;
                    match AXIS_NAMES[*axis] {
                        "eta" => c.eta = v,
                        "beta" => c.beta = v,
                        "alpha" => c.alpha = Some(v),
                        "k" => c.k = v as u32,
                        "rho" => c.rho = v,
                        "seed" => c.seed = v as u64,
                        _ => unreachable!(),
                    }
                    c
                })
            })
            .collect();
    }

    struct Row {
        cell: SweepCell,
        repeat: u64,
        run_seed: u64,
        outcome: Result<(f64, f64, f64, u64, f64, bool)>, // f1, pol, if, steps, time_ms, converged
    }

    let n = args.n;
    let ell = args.ell;
    let max_steps = args.max_steps;
    let xi = args.xi;
    let jobs: Vec<(SweepCell, u64)> = cells
        .iter()
        .flat_map(|&c| (0..args.repeats).map(move |r| (c, r)))
        .collect();
    let rows: Vec<Row> = runner::run_jobs(jobs.len(), |idx| {
        let (cell, repeat) = jobs[idx];
        let run_seed = cell.seed.wrapping_add(repeat);
        let outcome = (|| -> Result<_> {
            let params = SsbmParams {
                n,
                k: cell.k,
                ell,
                eta: cell.eta,
                rho: cell.rho,
                seed: run_seed,
            };
            let (graph, truth) = generate(&params)?;
            let alpha = cell
                .alpha
                .unwrap_or_else(|| ObjectiveParams::default_alpha(cell.k));
            let cfg = SolverConfig {
                k: cell.k,
                params: ObjectiveParams::new(alpha, cell.beta),
                seed: run_seed,
                max_steps,
                ..SolverConfig::new(cell.k)
            };
            let (assignment, report) = solve(&graph, &cfg)?;
            let metrics = quality_report(&graph, &assignment, alpha, xi, Some(&truth))?;
            Ok((
                metrics.f1.unwrap_or(0.0),
                metrics.polarity,
                metrics.imbalance_factor,
                report.steps,
                report.wall_time.as_secs_f64() * 1e3,
                report.converged,
            ))
        })();
        Row {
            cell,
            repeat,
            run_seed,
            outcome,
        }
    });

    let mut out = BufWriter::new(
        File::create(&args.out).with_context(|| format!("cannot write {}", args.out.display()))?,
    );
    writeln!(
        out,
        "n,k,ell,eta,rho,alpha,beta,seed,repeat,run_seed,f1,pol,if,steps,time_ms,converged,error"
    )?;
    for row in &rows {
        let alpha = row
            .cell
            .alpha
            .unwrap_or_else(|| ObjectiveParams::default_alpha(row.cell.k));
        match &row.outcome {
            Ok((f1, pol, ifac, steps, time_ms, converged)) => writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},",
                n,
                row.cell.k,
                ell,
                row.cell.eta,
                row.cell.rho,
                alpha,
                row.cell.beta,
                row.cell.seed,
                row.repeat,
                row.run_seed,
                f1,
                pol,
                ifac,
                steps,
                time_ms,
                converged
            )?,
            Err(e) => writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},,,,,,,{}",
                n,
                row.cell.k,
                ell,
                row.cell.eta,
                row.cell.rho,
                alpha,
                row.cell.beta,
                row.cell.seed,
                row.repeat,
                row.run_seed,
                csv_field(&format!("{e:#}"))
            )?,
        }
    }
    out.flush()?;
    let failures = rows.iter().filter(|r| r.outcome.is_err()).count();
    eprintln!(
        "wrote {} rows to {} ({} failed cells)",
        rows.len(),
        args.out.display(),
        failures
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: &BenchArgs) -> Result<ExitCode> {
    let ell = args.ell.unwrap_or((args.n / (args.k as usize + 1)) as u64);
    let seed = args.seed.unwrap_or_else(default_seed);
    let params = SsbmParams {
        n: args.n,
        k: args.k,
        ell,
        eta: args.eta,
        rho: args.rho,
        seed,
    };
    let (graph, _) = generate(&params)?;
    let alpha = resolve_alpha(&args.alpha, args.k)?;
    check_finite("beta", args.beta)?;
    let base = SolverConfig {
        k: args.k,
        params: ObjectiveParams::new(alpha, args.beta),
        seed,
        max_steps: args.max_steps,
        ..SolverConfig::new(args.k)
    };
    let rows = runner::bench_variants(&graph, &base, args.runs)
        .context("benchmark aborted: solver variants disagree")?;
    let mut payload = String::from(
        "n,k,ell,eta,rho,alpha,beta,run,seed,variant,time_ms,steps,objective,converged\n",
    );
    for r in &rows {
        payload.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            args.n,
            args.k,
            ell,
            args.eta,
            args.rho,
            alpha,
            args.beta,
            r.run,
            r.seed,
            r.variant,
            r.time_ms,
            r.steps,
            r.objective,
            r.converged
        ));
    }
    for variant in runner::BENCH_VARIANTS {
        eprintln!(
            "{variant}: median {:.1} ms over {} runs",
            runner::median_time_ms(&rows, variant),
            args.runs
        );
    }
    write_output(args.out.as_deref(), payload.trim_end())?;
    Ok(ExitCode::SUCCESS)
}

fn is_input_error(e: &anyhow::Error) -> bool {
    e.chain().any(|cause| {
        cause.is::<std::io::Error>()
            || cause.is::<lspcd::graph::ParseError>()
            || cause.is::<lspcd::graph::GraphError>()
            || cause.is::<lspcd::assignment::AssignmentError>()
            || cause.is::<lspcd::ssbm::SsbmError>()
            || cause.is::<lspcd::metrics::MetricsError>()
            || cause.is::<lspcd::objective::ObjectiveError>()
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    runner::configure_threads(cli.threads);
    let result = match &cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.chain().any(|c| c.is::<UsageError>()) {
                ExitCode::from(EXIT_USAGE)
            } else if is_input_error(&e) {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
