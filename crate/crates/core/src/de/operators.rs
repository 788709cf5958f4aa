//! Mutation, crossover, bound repair and selection.

use super::rng::{DrawSource, RngStream};
use super::{Candidate, ProblemBounds};

/// Draws `k` distinct indices from `0..n`, all different from `exclude`.
///
/// Rejection sampling keeps each draw uniform over the allowed set.
pub fn pick_distinct<R: DrawSource + ?Sized>(
    n: usize,
    exclude: &[usize],
    k: usize,
    rng: &mut R,
) -> Vec<usize> {
    let allowed = (0..n).filter(|r| !exclude.contains(r)).count();
    assert!(
        allowed >= k,
        "cannot draw {k} distinct indices from {allowed} candidates"
    );
    let mut picked = Vec::with_capacity(k);
    while picked.len() < k {
        let r = rng.index(n);
        if !exclude.contains(&r) && !picked.contains(&r) {
            picked.push(r);
        }
    }
    picked
}

/// `base + f * (a - b)`.
pub fn rand1(base: &[f64], a: &[f64], b: &[f64], f: f64) -> Vec<f64> {
    base.iter()
        .zip(a.iter().zip(b))
        .map(|(x, (p, q))| x + f * (p - q))
        .collect()
}

/// `current + f * (best - current) + f * (a - b)`.
pub fn current_to_best1(current: &[f64], best: &[f64], a: &[f64], b: &[f64], f: f64) -> Vec<f64> {
    current
        .iter()
        .zip(best)
        .zip(a.iter().zip(b))
        .map(|((x, xb), (p, q))| x + f * (xb - x) + f * (p - q))
        .collect()
}

/// rand/1 mutant for target `i`: three distinct partners, none equal to `i`.
pub fn mutate_rand1<R: DrawSource + ?Sized>(
    pop: &[Candidate],
    i: usize,
    f: f64,
    rng: &mut R,
) -> Vec<f64> {
    let r = pick_distinct(pop.len(), &[i], 3, rng);
    rand1(&pop[r[0]].x, &pop[r[1]].x, &pop[r[2]].x, f)
}

/// current-to-best/1 mutant for target `i`: two distinct partners, neither
/// equal to `i` nor to `best`.
pub fn mutate_current_to_best1<R: DrawSource + ?Sized>(
    pop: &[Candidate],
    i: usize,
    best: usize,
    f: f64,
    rng: &mut R,
) -> Vec<f64> {
    let r = pick_distinct(pop.len(), &[i, best], 2, rng);
    current_to_best1(&pop[i].x, &pop[best].x, &pop[r[0]].x, &pop[r[1]].x, f)
}

/// Binomial crossover. Draws the forced index first, then one uniform per
/// component; component `j` comes from the mutant when its uniform is at
/// most `cr` or `j` is the forced index.
pub fn binomial_crossover<R: DrawSource + ?Sized>(
    target: &[f64],
    mutant: &[f64],
    cr: f64,
    rng: &mut R,
) -> Vec<f64> {
    assert_eq!(target.len(), mutant.len(), "crossover of unequal vectors");
    let j_rand = rng.index(target.len());
    target
        .iter()
        .zip(mutant)
        .enumerate()
        .map(|(j, (&x, &v))| {
            let u = rng.uniform();
            if u <= cr || j == j_rand {
                v
            } else {
                x
            }
        })
        .collect()
}

/// Clamps every component into its bounds.
pub fn clamp_to_bounds(mut u: Vec<f64>, bounds: &ProblemBounds) -> Vec<f64> {
    for ((v, lo), hi) in u.iter_mut().zip(&bounds.lower).zip(&bounds.upper) {
        *v = v.clamp(*lo, *hi);
    }
    u
}

/// Greedy one-to-one selection: the offspring survives only on strict improvement.
pub fn select(parent: Candidate, offspring: Candidate) -> Candidate {
    if offspring.fitness > parent.fitness {
        offspring
    } else {
        parent
    }
}

/// Uniform random population inside the bounds; fitness left unset.
pub fn init_population(bounds: &ProblemBounds, n: usize, rng: &mut RngStream) -> Vec<Candidate> {
    (0..n)
        .map(|_| {
            let x = bounds
                .lower
                .iter()
                .zip(&bounds.upper)
                .map(|(&lo, &hi)| rng.uniform_in(lo, hi))
                .collect();
            Candidate::unevaluated(x)
        })
        .collect()
}

/// Index of the highest fitness, lowest index on ties.
pub fn best_index(pop: &[Candidate]) -> usize {
    let mut best = 0;
    for (k, c) in pop.iter().enumerate().skip(1) {
        if c.fitness > pop[best].fitness {
            best = k;
        }
    }
    best
}
