//! The eight DE configurations of the study and their desk-scale variants.

use crate::de::{DeConfig, Strategy};
use crate::error::{Error, Result};

/// Objective evaluations per run in the full protocol.
pub const FULL_BUDGET: usize = 10_000;
/// Objective evaluations per run on the desk-scale cases.
pub const MINI_BUDGET: usize = 2_000;
/// Desk-scale runs divide the population size by this.
pub const MINI_POPULATION_DIVISOR: usize = 5;

/// `(N, CR, F, strategy)` for configurations 1..=8.
const TABLE: [(usize, f64, f64, Strategy); 8] = [
    (100, 0.5, 0.9, Strategy::Rand1),
    (100, 0.9, 0.5, Strategy::Rand1),
    (200, 0.5, 0.9, Strategy::Rand1),
    (200, 0.9, 0.5, Strategy::Rand1),
    (100, 0.5, 0.9, Strategy::CurrentToBest1),
    (100, 0.9, 0.5, Strategy::CurrentToBest1),
    (200, 0.5, 0.9, Strategy::CurrentToBest1),
    (200, 0.9, 0.5, Strategy::CurrentToBest1),
];

/// Configuration `k` (1-based) with the full budget and seed 0.
pub fn builtin_config(k: usize) -> Result<DeConfig> {
    let &(pop_size, cr, f, strategy) = k
        .checked_sub(1)
        .and_then(|i| TABLE.get(i))
        .ok_or_else(|| Error::Config(format!("DE configuration must be 1..=8, got {k}")))?;
    Ok(DeConfig {
        pop_size,
        f,
        cr,
        strategy,
        budget: FULL_BUDGET,
        seed: 0,
        charge_penalties: true,
    })
}

/// Configuration `k` scaled for the desk-scale cases: N / 5 and a budget of 2,000.
pub fn mini_config(k: usize) -> Result<DeConfig> {
    let c = builtin_config(k)?;
    Ok(DeConfig {
        pop_size: c.pop_size / MINI_POPULATION_DIVISOR,
        budget: MINI_BUDGET,
        ..c
    })
}
