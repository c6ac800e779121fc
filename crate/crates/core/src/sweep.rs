//! Batches of independent runs. Each run stays single-threaded; with the
//! `parallel` feature, runs are spread over the rayon pool.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::SimError;
use crate::run::{run_scenario, RunArtifacts};
use crate::scenario::{Mode, Scenario};

pub fn run_batch(scenarios: &[Scenario]) -> Vec<Result<RunArtifacts, SimError>> {
    #[cfg(feature = "parallel")]
    {
        run_batch_parallel(scenarios)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_batch_sequential(scenarios)
    }
}

pub fn run_batch_sequential(scenarios: &[Scenario]) -> Vec<Result<RunArtifacts, SimError>> {
    scenarios.iter().map(run_scenario).collect()
}

#[cfg(feature = "parallel")]
pub fn run_batch_parallel(scenarios: &[Scenario]) -> Vec<Result<RunArtifacts, SimError>> {
    scenarios.par_iter().map(run_scenario).collect()
}

/// Runs two scenarios, concurrently when the `parallel` feature is on.
pub fn run_pair(
    a: &Scenario,
    b: &Scenario,
) -> (Result<RunArtifacts, SimError>, Result<RunArtifacts, SimError>) {
    #[cfg(feature = "parallel")]
    {
        rayon::join(|| run_scenario(a), || run_scenario(b))
    }
    #[cfg(not(feature = "parallel"))]
    {
        (run_scenario(a), run_scenario(b))
    }
}

/// Copies of `base` for each seed.
pub fn seed_variants(base: &Scenario, seeds: impl IntoIterator<Item = u64>) -> Vec<Scenario> {
    seeds
        .into_iter()
        .map(|seed| {
            base.with_config(|c| c.seed = seed)
                .expect("changing the seed keeps a scenario valid")
        })
        .collect()
}

/// The same scenario in scor and vcor mode.
pub fn mode_pair(base: &Scenario) -> Result<(Scenario, Scenario), SimError> {
    let scor = base.with_config(|c| c.set_mode(Mode::Scor))?;
    let vcor = base.with_config(|c| c.set_mode(Mode::Vcor))?;
    Ok((scor, vcor))
}
