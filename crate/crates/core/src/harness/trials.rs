//! Seeded trial batteries and their statistics.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::cases::CaseSpec;
use crate::de::{run_de, DeConfig};
use crate::economics::Money;
use crate::error::{Error, Result};
use crate::placement::{decode_cells, PlacementProblem};

/// Outcome of one independent DE run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    /// 1-based trial number.
    pub trial: usize,
    pub seed: u64,
    pub best: Money,
    pub best_x: Vec<f64>,
    /// Decoded 1-based well cells of the best candidate.
    pub cells: Vec<(usize, usize)>,
    /// Best-so-far after each charged evaluation.
    pub best_so_far: Vec<Money>,
    pub evaluations: usize,
    pub invocations: usize,
    pub wall_time: Duration,
}

impl TrialRecord {
    pub fn failed(&self) -> bool {
        !self.best.is_finite()
    }
}

/// Best, worst, mean, sample SD and median of a set of finals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub best: f64,
    pub worst: f64,
    pub mean: f64,
    pub sd: f64,
    pub median: f64,
}

/// Statistics of `finals`. SD uses the n-1 denominator (0 for a single
/// value); the median of an even count averages the middle pair.
pub fn summarize(finals: &[f64]) -> Result<Stats> {
    if finals.is_empty() {
        return Err(Error::Validation(
            "cannot summarize an empty set of finals".into(),
        ));
    }
    if let Some(bad) = finals.iter().find(|v| !v.is_finite()) {
        return Err(Error::Validation(format!("final NPV {bad} is not finite")));
    }
    let n = finals.len();
    let mut sorted = finals.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    Ok(Stats {
        best: sorted[n - 1],
        worst: sorted[0],
        mean,
        sd,
        median,
    })
}

/// All trials of one (case, configuration) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub config: DeConfig,
    pub trials: Vec<TrialRecord>,
    /// Statistics over the trials that found a feasible layout; `None` when
    /// none did.
    pub stats: Option<Stats>,
    pub failed_trials: usize,
}

impl TrialSummary {
    pub fn from_trials(config: DeConfig, trials: Vec<TrialRecord>) -> Result<Self> {
        let finals: Vec<f64> = trials
            .iter()
            .filter(|t| !t.failed())
            .map(|t| t.best.0)
            .collect();
        let failed_trials = trials.len() - finals.len();
        let stats = if finals.is_empty() {
            None
        } else {
            Some(summarize(&finals)?)
        };
        Ok(TrialSummary {
            config,
            trials,
            stats,
            failed_trials,
        })
    }

    pub fn finals(&self) -> Vec<Money> {
        self.trials.iter().map(|t| t.best).collect()
    }

    /// Mean over trials of best-so-far at each charged evaluation, counting
    /// only trials with a finite value at that point; `None` when no trial
    /// has one yet.
    pub fn mean_best_so_far(&self) -> Vec<Option<f64>> {
        let len = self
            .trials
            .iter()
            .map(|t| t.best_so_far.len())
            .max()
            .unwrap_or(0);
        (0..len)
            .map(|k| {
                let finite: Vec<f64> = self
                    .trials
                    .iter()
                    .filter_map(|t| t.best_so_far.get(k).or(t.best_so_far.last()))
                    .map(|m| m.0)
                    .filter(|v| v.is_finite())
                    .collect();
                (!finite.is_empty()).then(|| finite.iter().sum::<f64>() / finite.len() as f64)
            })
            .collect()
    }
}

/// Runs one trial of `config` on an already built problem.
pub fn run_trial(
    problem: &PlacementProblem,
    config: &DeConfig,
    trial: usize,
    seed: u64,
) -> Result<TrialRecord> {
    let start = Instant::now();
    let cfg = DeConfig { seed, ..*config };
    let result = run_de(&cfg, &problem.bounds(), problem).map_err(|e| Error::Trial {
        trial,
        source: Box::new(e),
    })?;
    Ok(TrialRecord {
        trial,
        seed,
        best: result.best.fitness,
        cells: decode_cells(&result.best.x, problem.grid()),
        best_x: result.best.x,
        best_so_far: result.history.best_so_far,
        evaluations: result.history.evaluations,
        invocations: result.history.invocations,
        wall_time: start.elapsed(),
    })
}

/// Runs `n_trials` independent trials; trial `t` (1-based) uses seed
/// `base_seed + t`. Trials run concurrently; the result does not depend on
/// scheduling. The first failing trial, in trial order, is reported.
pub fn run_trials_on(
    problem: &PlacementProblem,
    config: &DeConfig,
    n_trials: usize,
    base_seed: u64,
) -> Result<TrialSummary> {
    if n_trials == 0 {
        return Err(Error::Config("at least one trial is required".into()));
    }
    config.validate()?;
    let records: Vec<Result<TrialRecord>> = (1..=n_trials)
        .into_par_iter()
        .map(|t| run_trial(problem, config, t, base_seed.wrapping_add(t as u64)))
        .collect();
    let records = records.into_iter().collect::<Result<Vec<_>>>()?;
    TrialSummary::from_trials(*config, records)
}

/// Builds the case and runs the battery on it.
pub fn run_trials(
    case: &CaseSpec,
    config: &DeConfig,
    n_trials: usize,
    base_seed: u64,
) -> Result<TrialSummary> {
    let problem = case.build_problem()?;
    run_trials_on(&problem, config, n_trials, base_seed)
}
