//! Classical Differential Evolution (maximization).
//!
//! One generation builds a trial vector for every member (mutation, binomial
//! crossover, clamping), evaluates the trials, then applies one-to-one greedy
//! selection. All random draws for a generation happen before any
//! evaluation, so evaluating in parallel gives the same run as evaluating in
//! order.

mod operators;
mod rng;
mod run;

pub use operators::{
    best_index, binomial_crossover, clamp_to_bounds, current_to_best1, init_population,
    mutate_current_to_best1, mutate_rand1, pick_distinct, rand1, select,
};
pub use rng::{DrawSource, RngStream, ScriptedDraws};
pub use run::{run_de, run_de_observed, GenerationReport, RunHistory, RunResult};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::economics::Money;
use crate::error::{Error, Result};

/// Box constraints of the search space.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ProblemBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::Validation(format!(
                "bounds need equal, nonzero lengths; got {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(j) = (0..lower.len()).find(|&j| !(lower[j] < upper[j])) {
            return Err(Error::Validation(format!(
                "lower bound {} not below upper bound {} in dimension {j}",
                lower[j], upper[j]
            )));
        }
        Ok(ProblemBounds { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(&self.lower)
                .zip(&self.upper)
                .all(|((v, lo), hi)| (lo..=hi).contains(&v))
    }
}

/// A point of the search space with its fitness (`NEG_INFINITY` when
/// penalized or not yet evaluated).
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub x: Vec<f64>,
    pub fitness: Money,
}

impl Candidate {
    pub fn unevaluated(x: Vec<f64>) -> Self {
        Candidate {
            x,
            fitness: Money::NEG_INFINITY,
        }
    }
}

/// Mutation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "rand/1")]
    Rand1,
    #[serde(rename = "current-to-best/1")]
    CurrentToBest1,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Rand1 => "rand/1",
            Strategy::CurrentToBest1 => "current-to-best/1",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rand/1" | "rand1" => Ok(Strategy::Rand1),
            "current-to-best/1" | "current-to-best1" => Ok(Strategy::CurrentToBest1),
            other => Err(Error::Config(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Control parameters of one DE run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeConfig {
    pub pop_size: usize,
    /// Mutation factor F.
    pub f: f64,
    /// Crossover probability CR.
    pub cr: f64,
    pub strategy: Strategy,
    /// Maximum number of charged objective evaluations.
    pub budget: usize,
    pub seed: u64,
    /// Whether evaluations rejected without simulation count against the budget.
    #[serde(default = "default_true")]
    pub charge_penalties: bool,
}

fn default_true() -> bool {
    true
}

impl DeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 4 {
            return Err(Error::Config(format!(
                "population size must be at least 4, got {}",
                self.pop_size
            )));
        }
        if self.budget < self.pop_size {
            return Err(Error::Config(format!(
                "budget {} is smaller than the population size {}",
                self.budget, self.pop_size
            )));
        }
        if !(0.0..=2.0).contains(&self.f) {
            return Err(Error::Config(format!(
                "F must lie in [0, 2], got {}",
                self.f
            )));
        }
        if !(0.0..=1.0).contains(&self.cr) {
            return Err(Error::Config(format!(
                "CR must lie in [0, 1], got {}",
                self.cr
            )));
        }
        Ok(())
    }
}

/// Result of evaluating one candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub fitness: Money,
    /// False when the candidate was rejected before any simulation ran.
    pub simulated: bool,
}

/// Objective to maximize. Implementations must be deterministic.
pub trait Objective: Sync {
    fn evaluate(&self, x: &[f64]) -> Result<Evaluation>;
}

/// Adapts a plain function into an [`Objective`]; every call counts as simulated.
pub struct FnObjective<F>(pub F);

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64]) -> Money + Sync,
{
    fn evaluate(&self, x: &[f64]) -> Result<Evaluation> {
        Ok(Evaluation {
            fitness: (self.0)(x),
            simulated: true,
        })
    }
}
