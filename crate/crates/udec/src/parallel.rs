//! Monte-Carlo trials spread over a thread pool.
//!
//! Trials are cut into fixed blocks; each worker runs whole blocks with its
//! own [`TrialRunner`]. Trial `t` only depends on the seed and `t`, so the
//! totals do not depend on the worker count or on scheduling.

use rayon::prelude::*;
use udec_core::decoding::{DecoderSpec, ErrorProbReport, MonteCarloSetup, Tally, TrialRunner};
use udec_core::model::SystemModel;

use crate::{Error, Result};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "UDEC_WORKERS";

const BLOCK: u64 = 1024;

/// Worker count from [`WORKERS_ENV`], else the number of available cores.
pub fn worker_count() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::Validation(format!("{WORKERS_ENV}={v:?} is not a positive integer"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn tally(
    model: &SystemModel,
    setup: MonteCarloSetup,
    decoders: &[DecoderSpec],
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<Tally> {
    // Fail early on bad decoder specs instead of inside a worker.
    TrialRunner::new(model, setup, decoders, seed)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Validation(e.to_string()))?;
    let blocks: Vec<_> = (0..trials.div_ceil(BLOCK))
        .map(|b| b * BLOCK..((b + 1) * BLOCK).min(trials))
        .collect();
    let parts: Vec<Tally> = pool.install(|| {
        blocks
            .into_par_iter()
            .map_init(
                || TrialRunner::new(model, setup, decoders, seed).expect("validated above"),
                |runner, range| runner.run_range(range),
            )
            .collect()
    });
    Ok(parts.iter().fold(Tally::new(decoders.len()), |acc, t| acc.merge(t)))
}

/// Parallel counterpart of `monte_carlo_errors`; identical output.
pub fn monte_carlo(
    model: &SystemModel,
    n: usize,
    rate: f64,
    decoders: &[DecoderSpec],
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<Vec<ErrorProbReport>> {
    if trials == 0 {
        return Err(Error::Validation("trials must be at least 1".into()));
    }
    let setup = MonteCarloSetup::new(n, rate)?;
    Ok(tally(model, setup, decoders, trials, seed, workers)?.reports(&setup, decoders, seed))
}
