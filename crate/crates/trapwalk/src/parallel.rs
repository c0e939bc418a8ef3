//! Worker pool plumbing. Results are always gathered in configuration
//! order and reduced afterwards, so the worker count never changes a bit
//! of the output.

use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};
use trapwalk_core::ensemble::{reduce, run_configuration, EnsembleSpec, SurvivalSeries};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "TRAPWALK_WORKERS";

/// Worker count from [`WORKERS_ENV`], else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn pool(workers: usize) -> anyhow::Result<ThreadPool> {
    Ok(ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()?)
}

/// Per-configuration survival series in configuration order, evaluated on
/// the current rayon pool.
pub fn run_configurations(spec: &EnsembleSpec) -> trapwalk_core::Result<Vec<Vec<f64>>> {
    spec.validate()?;
    (0..spec.configurations)
        .into_par_iter()
        .map(|r| run_configuration(spec, r))
        .collect()
}

/// Ensemble average on a pool of `workers` threads, plus the raw runs.
pub fn ensemble_average(
    spec: &EnsembleSpec,
    workers: usize,
) -> anyhow::Result<(SurvivalSeries, Vec<Vec<f64>>)> {
    let runs = pool(workers)?.install(|| run_configurations(spec))?;
    Ok((reduce(spec, &runs)?, runs))
}
