//! Seeded experiment sweeps over the gql-core learners.
//!
//! A run expands an [`ExperimentConfig`] into `grid.len() * trials` trials,
//! executes them on a rayon pool, and returns one [`TrialRecord`] per trial in
//! grid-then-trial order together with a [`Summary`]. Each trial derives its
//! own random stream from the master seed and its index, so the output does
//! not depend on the thread count.

pub mod config;
pub mod output;
pub mod summary;
pub mod trial;

use thiserror::Error;

pub use config::{BackendId, ExperimentConfig, GridPoint, LearnerId};
pub use output::{emit, read_records, write_records, Format};
pub use summary::{fit_slope, Summary};
pub use trial::{run_trial, TrialRecord};

use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("instance generation failed: {0}")]
    Instance(String),
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` at grid point `point`.
pub fn trial_seed(master: u64, point: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(master ^ splitmix64(point as u64)) ^ trial as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
}

/// Runs every trial of `config` on `threads` worker threads (0 = rayon's
/// default).
pub fn run(config: &ExperimentConfig, threads: usize) -> Result<RunOutput, HarnessError> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = (0..config.grid.len())
        .flat_map(|p| (0..config.trials).map(move |t| (p, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let records = pool.install(|| {
        jobs.par_iter()
            .map(|&(p, t)| run_trial(config, p, trial_seed(config.seed, p, t)))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let summary = Summary::new(config, &records);
    Ok(RunOutput { records, summary })
}
