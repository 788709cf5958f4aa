use std::fmt::Write as _;

use rayon::prelude::*;

use super::operators::{
    best_index, binomial_crossover, clamp_to_bounds, init_population, mutate_current_to_best1,
    mutate_rand1, select,
};
use super::rng::RngStream;
use super::{Candidate, DeConfig, Evaluation, Objective, ProblemBounds, Strategy};
use crate::economics::Money;
use crate::error::{Error, Result};
use crate::format::sig6;

/// When penalties are free, stop after this many invocations per budget unit
/// so a population stuck in infeasible space still terminates.
const FREE_EVALUATION_CAP: usize = 100;

/// Trajectory of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunHistory {
    /// Best population fitness after each generation; entry 0 is the
    /// initial population.
    pub generation_best: Vec<Money>,
    /// Mean fitness of the feasible members after each generation.
    pub generation_mean_feasible: Vec<Option<f64>>,
    /// Best fitness seen so far after each charged evaluation.
    pub best_so_far: Vec<Money>,
    /// Charged evaluations.
    pub evaluations: usize,
    /// Objective calls, charged or not.
    pub invocations: usize,
    pub final_population: Vec<Candidate>,
}

impl RunHistory {
    /// `eval_index,best_so_far_npv` CSV (1-based evaluation index).
    pub fn evaluations_csv(&self) -> String {
        let mut out = String::from("eval_index,best_so_far_npv\n");
        for (k, b) in self.best_so_far.iter().enumerate() {
            writeln!(out, "{},{}", k + 1, sig6(b.0)).unwrap();
        }
        out
    }

    /// `gen,gen_best,gen_mean_feasible` CSV; an empty mean means no feasible member.
    pub fn generations_csv(&self) -> String {
        let mut out = String::from("gen,gen_best,gen_mean_feasible\n");
        for (g, (b, m)) in self
            .generation_best
            .iter()
            .zip(&self.generation_mean_feasible)
            .enumerate()
        {
            let mean = m.map(sig6).unwrap_or_default();
            writeln!(out, "{g},{},{mean}", sig6(b.0)).unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best: Candidate,
    pub history: RunHistory,
}

/// What the generation hook sees: the population before selection, each
/// trial with its evaluation (`None` when the budget ran out first), and
/// the survivors.
#[derive(Debug)]
pub struct GenerationReport<'a> {
    pub generation: usize,
    pub parents: &'a [Candidate],
    pub trials: &'a [(Vec<f64>, Option<Evaluation>)],
    pub survivors: &'a [Candidate],
}

pub fn run_de(
    config: &DeConfig,
    bounds: &ProblemBounds,
    objective: &dyn Objective,
) -> Result<RunResult> {
    run_de_observed(config, bounds, objective, &mut |_| {})
}

/// Evaluates `batch` in parallel, preserving order.
fn evaluate_batch(objective: &dyn Objective, batch: &[Vec<f64>]) -> Result<Vec<Evaluation>> {
    batch.par_iter().map(|x| objective.evaluate(x)).collect()
}

struct Ledger<'c> {
    config: &'c DeConfig,
    budget_left: usize,
    invocations: usize,
    best: Option<Candidate>,
    best_so_far: Vec<Money>,
}

impl Ledger<'_> {
    fn charged(&self, e: &Evaluation) -> bool {
        e.simulated || self.config.charge_penalties
    }

    /// Evaluates candidates in order until they run out or the budget is
    /// spent. Returns one slot per candidate.
    fn evaluate_in_order(
        &mut self,
        objective: &dyn Objective,
        xs: &[Vec<f64>],
    ) -> Result<Vec<Option<Evaluation>>> {
        let mut out: Vec<Option<Evaluation>> = vec![None; xs.len()];
        let mut next = 0;
        while next < xs.len() && self.budget_left > 0 {
            if self.invocations >= FREE_EVALUATION_CAP * self.config.budget {
                break;
            }
            let end = (next + self.budget_left).min(xs.len());
            let results = evaluate_batch(objective, &xs[next..end])?;
            self.invocations += end - next;
            for (k, e) in results.into_iter().enumerate() {
                if self.budget_left == 0 {
                    break;
                }
                if self.charged(&e) {
                    self.budget_left -= 1;
                    self.record(&xs[next + k], e.fitness);
                }
                out[next + k] = Some(e);
            }
            next = end;
        }
        Ok(out)
    }

    fn record(&mut self, x: &[f64], fitness: Money) {
        if self.best.as_ref().is_none_or(|b| fitness > b.fitness) {
            self.best = Some(Candidate {
                x: x.to_vec(),
                fitness,
            });
        }
        let current = self
            .best
            .as_ref()
            .map_or(Money::NEG_INFINITY, |b| b.fitness);
        self.best_so_far.push(current);
    }
}

fn feasible_mean(pop: &[Candidate]) -> Option<f64> {
    let finite: Vec<f64> = pop
        .iter()
        .map(|c| c.fitness.0)
        .filter(|f| f.is_finite())
        .collect();
    (!finite.is_empty()).then(|| finite.iter().sum::<f64>() / finite.len() as f64)
}

/// Runs DE until the evaluation budget is spent, calling `hook` after every
/// generation's selection.
pub fn run_de_observed(
    config: &DeConfig,
    bounds: &ProblemBounds,
    objective: &dyn Objective,
    hook: &mut dyn FnMut(&GenerationReport<'_>),
) -> Result<RunResult> {
    config.validate()?;
    let n = config.pop_size;
    let mut rng = RngStream::new(config.seed);
    let mut ledger = Ledger {
        config,
        budget_left: config.budget,
        invocations: 0,
        best: None,
        best_so_far: Vec::with_capacity(config.budget),
    };

    let mut pop = init_population(bounds, n, &mut rng);
    let xs: Vec<Vec<f64>> = pop.iter().map(|c| c.x.clone()).collect();
    let initial = ledger.evaluate_in_order(objective, &xs)?;
    for (c, e) in pop.iter_mut().zip(&initial) {
        if let Some(e) = e {
            c.fitness = e.fitness;
        }
    }
    let mut generation_best = vec![pop[best_index(&pop)].fitness];
    let mut generation_mean_feasible = vec![feasible_mean(&pop)];

    let mut generation = 0;
    while ledger.budget_left > 0 && ledger.invocations < FREE_EVALUATION_CAP * config.budget {
        generation += 1;
        let best = best_index(&pop);
        let trials: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mutant = match config.strategy {
                    Strategy::Rand1 => mutate_rand1(&pop, i, config.f, &mut rng),
                    Strategy::CurrentToBest1 => {
                        mutate_current_to_best1(&pop, i, best, config.f, &mut rng)
                    }
                };
                let u = binomial_crossover(&pop[i].x, &mutant, config.cr, &mut rng);
                clamp_to_bounds(u, bounds)
            })
            .collect();
        let evaluations = ledger.evaluate_in_order(objective, &trials)?;

        let survivors: Vec<Candidate> = pop
            .iter()
            .zip(trials.iter().zip(&evaluations))
            .map(|(parent, (x, e))| match e {
                Some(e) => select(
                    parent.clone(),
                    Candidate {
                        x: x.clone(),
                        fitness: e.fitness,
                    },
                ),
                None => parent.clone(),
            })
            .collect();
        let paired: Vec<(Vec<f64>, Option<Evaluation>)> =
            trials.into_iter().zip(evaluations).collect();
        hook(&GenerationReport {
            generation,
            parents: &pop,
            trials: &paired,
            survivors: &survivors,
        });
        pop = survivors;
        generation_best.push(pop[best_index(&pop)].fitness);
        generation_mean_feasible.push(feasible_mean(&pop));
    }

    let best = ledger
        .best
        .clone()
        .or_else(|| pop.first().cloned())
        .ok_or_else(|| Error::Config("empty population".into()))?;
    Ok(RunResult {
        best,
        history: RunHistory {
            generation_best,
            generation_mean_feasible,
            evaluations: config.budget - ledger.budget_left,
            invocations: ledger.invocations,
            best_so_far: ledger.best_so_far,
            final_population: pop,
        },
    })
}
