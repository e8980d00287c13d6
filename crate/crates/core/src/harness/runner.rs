use rayon::prelude::*;

use super::scenario::{Scenario, TaskSpec};
use crate::error::{Error, Result};
use crate::tasks::{run_cutting, run_debridement, TrialReport};

pub const THREADS_ENV: &str = "RSYNC_SIM_THREADS";

/// Worker count from `RSYNC_SIM_THREADS`; unset, unparsable, or 0 means auto.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0)
}

/// Run every (policy, trial) pair. Trial `i` uses seed `seed + i` for every
/// policy, so policies face identical platforms, noise, and phantoms. Output
/// is ordered by policy (as listed) then trial, whatever the thread count.
pub fn run_scenario(sc: &Scenario) -> Result<Vec<TrialReport>> {
    sc.validate()?;
    let env = sc.environment()?;
    let jobs: Vec<_> = sc
        .policies
        .iter()
        .flat_map(|&p| (0..sc.n_trials).map(move |i| (p, i)))
        .collect();
    let run = |&(policy, trial): &(crate::control::Policy, usize)| {
        let seed = sc.seed.wrapping_add(trial as u64);
        let mut r = match &sc.task {
            TaskSpec::Cutting(t) => run_cutting(t, &env, policy, seed),
            TaskSpec::Debridement(t) => run_debridement(t, &env, policy, seed),
        }?;
        r.scenario = sc.name.clone();
        r.trial = trial;
        Ok(r)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| Error::Config {
            path: THREADS_ENV.into(),
            reason: e.to_string(),
        })?;
    pool.install(|| jobs.par_iter().map(run).collect())
}
