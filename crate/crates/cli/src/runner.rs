//! Parallel evolution with results restored to input order.

use rayon::prelude::*;

use cdising::coefficients::MomentumGrid;
use cdising::dynamics::{assemble, evolve_mode};
use cdising::{ChainConfig, EvolutionResult};

use crate::error::{CliError, Context};

/// Evolves every mode of `config` in parallel and combines them in grid order.
pub fn evolve(config: &ChainConfig) -> cdising::Result<EvolutionResult> {
    config.validate()?;
    let grid = MomentumGrid::new(config.chain_len)?;
    let runs = grid
        .values()
        .par_iter()
        .map(|&k| evolve_mode(k, config))
        .collect::<cdising::Result<Vec<_>>>()?;
    assemble(config, &runs)
}

/// Runs `job` over `items` on the pool; output order follows `items`.
pub fn map_ordered<I, T, F>(
    pool: &rayon::ThreadPool,
    items: &[I],
    job: F,
) -> Result<Vec<T>, CliError>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> Result<T, CliError> + Sync,
{
    pool.install(|| items.par_iter().map(&job).collect())
}

pub fn pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {threads} worker threads: {e}")))
}

pub fn evolve_labelled(
    config: &ChainConfig,
    label: impl FnOnce() -> String,
) -> Result<EvolutionResult, CliError> {
    evolve(config).context(label)
}
