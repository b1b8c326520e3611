//! Data-parallel execution of independent runs.
//!
//! One solver run is strictly sequential, but sweeps, benchmarks, and
//! multi-seed evaluations are embarrassingly parallel over a shared
//! immutable graph. With the `parallel` feature (on by default) these fan
//! out over a rayon pool; without it the same API runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::graph::SignedGraph;
use crate::solver::{solve, SolveReport, SolverConfig, SolverError, Variant};

/// Map `f` over `0..count`, preserving index order in the result.
#[cfg(feature = "parallel")]
pub fn run_jobs<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn run_jobs<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    run_jobs_sequential(count, f)
}

/// Sequential twin of [`run_jobs`], always available; benchmarks compare
/// the two directly.
pub fn run_jobs_sequential<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}

/// Bound the worker pool; `None` keeps the default (available parallelism).
/// Without the `parallel` feature this is a no-op.
pub fn configure_threads(threads: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(t) = threads {
        // Ignore failure: the global pool can only be built once.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub variant: Variant,
    pub run: usize,
    pub seed: u64,
    pub time_ms: f64,
    pub steps: u64,
    pub objective: f64,
    pub converged: bool,
}

pub const BENCH_VARIANTS: [Variant; 3] = [Variant::Naive, Variant::GradientDirect, Variant::Lspcd];

/// Time every solver variant on the same graph. Run `r` of each variant
/// shares seed `base.seed + r`, so the three trajectories are identical and
/// must land on identical final objectives; a mismatch is reported as an
/// error. Rows come back sorted by (variant order, run).
pub fn bench_variants(
    g: &SignedGraph,
    base: &SolverConfig,
    runs: usize,
) -> Result<Vec<BenchRow>, SolverError> {
    let jobs: Vec<(Variant, usize)> = BENCH_VARIANTS
        .iter()
        .flat_map(|&v| (0..runs).map(move |r| (v, r)))
        .collect();
    let outcomes: Vec<Result<(Variant, usize, SolveReport), SolverError>> =
        run_jobs(jobs.len(), |idx| {
            let (variant, run) = jobs[idx];
            let mut cfg = base.clone();
            cfg.variant = variant;
            cfg.seed = base.seed.wrapping_add(run as u64);
            let (_, report) = solve(g, &cfg)?;
            Ok((variant, run, report))
        });
    let mut rows = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        let (variant, run, report) = outcome?;
        rows.push(BenchRow {
            variant,
            run,
            seed: base.seed.wrapping_add(run as u64),
            time_ms: report.wall_time.as_secs_f64() * 1e3,
            steps: report.steps,
            objective: report.final_objective,
            converged: report.converged,
        });
    }
    for run in 0..runs {
        let per_run: Vec<&BenchRow> = rows.iter().filter(|r| r.run == run).collect();
        for pair in per_run.windows(2) {
            if pair[0].objective != pair[1].objective {
                return Err(SolverError::VariantMismatch {
                    run,
                    a: pair[0].variant,
                    b: pair[1].variant,
                    obj_a: pair[0].objective,
                    obj_b: pair[1].objective,
                });
            }
        }
    }
    Ok(rows)
}

/// Median of the run times of one variant, in milliseconds.
pub fn median_time_ms(rows: &[BenchRow], variant: Variant) -> f64 {
    let mut times: Vec<f64> = rows
        .iter()
        .filter(|r| r.variant == variant)
        .map(|r| r.time_ms)
        .collect();
    times.sort_by(|a, b| a.partial_cmp(b).expect("times are finite"));
    if times.is_empty() {
        return f64::NAN;
    }
    let mid = times.len() / 2;
    if times.len() % 2 == 1 {
        times[mid]
    } else {
        0.5 * (times[mid - 1] + times[mid])
    }
}
