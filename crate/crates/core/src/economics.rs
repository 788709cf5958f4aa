//! Net present value of a production profile.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{ProductionProfile, SimulationOutcome, WellKind};
use crate::units::{BARRELS_PER_M3, DAYS_PER_YEAR};

/// An amount in US dollars. `NEG_INFINITY` marks a death-penalized candidate.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Money(pub f64);

impl Money {
    pub const ZERO: Money = Money(0.0);
    pub const NEG_INFINITY: Money = Money(f64::NEG_INFINITY);

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_penalty(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// Total order for comparisons; NaN never arises from the objective.
    pub fn total_cmp(&self, other: &Money) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_penalty() {
            write!(f, "-inf")
        } else {
            write!(f, "${:.4e}", self.0)
        }
    }
}

/// Prices, discount rate and water-cut limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomicParams {
    /// Oil revenue, $/bbl.
    pub c_o: f64,
    /// Produced-water disposal cost, $/bbl.
    pub c_w_disp: f64,
    /// Water injection cost, $/bbl.
    pub c_w_inj: f64,
    /// Yearly interest rate (0.1 = 10%).
    pub r: f64,
    /// Producer water cut above which the producer is shut in.
    pub water_cut_threshold: f64,
}

impl Default for EconomicParams {
    fn default() -> Self {
        EconomicParams {
            c_o: 80.0,
            c_w_disp: 12.0,
            c_w_inj: 8.0,
            r: 0.10,
            water_cut_threshold: 0.78,
        }
    }
}

impl EconomicParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("c_o", self.c_o),
            ("c_w_disp", self.c_w_disp),
            ("c_w_inj", self.c_w_inj),
            ("r", self.r),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.water_cut_threshold) {
            return Err(Error::Validation(format!(
                "water cut threshold must lie in [0, 1], got {}",
                self.water_cut_threshold
            )));
        }
        Ok(())
    }
}

/// Water fraction of produced liquid; zero when nothing flows.
pub fn water_cut(q_w: f64, q_o: f64) -> f64 {
    let total = q_w + q_o;
    if total > 0.0 {
        q_w / total
    } else {
        0.0
    }
}

/// Discounted cash flow over the profile.
///
/// Rates are piecewise constant per step; each step contributes
/// `cash_rate * dt * (1 + r)^(-t_mid)` with `t_mid` in years. Volumes are
/// converted from m³ to barrels here and nowhere else.
pub fn npv(profile: &ProductionProfile, econ: &EconomicParams) -> Money {
    let growth = 1.0 + econ.r;
    let total = profile
        .steps
        .iter()
        .map(|step| {
            let cash_per_day: f64 = profile
                .wells
                .iter()
                .zip(&step.rates)
                .map(|(well, rate)| match well.kind {
                    WellKind::Producer => {
                        econ.c_o * rate.oil * BARRELS_PER_M3
                            - econ.c_w_disp * rate.water * BARRELS_PER_M3
                    }
                    WellKind::Injector => -econ.c_w_inj * rate.injection * BARRELS_PER_M3,
                })
                .sum();
            let t_mid = (step.start_days + 0.5 * step.dt_days) / DAYS_PER_YEAR;
            cash_per_day * step.dt_days * growth.powf(-t_mid)
        })
        .sum();
    Money(total)
}

/// NPV with the death penalty for flow-limit violations.
pub fn penalized_npv(outcome: &SimulationOutcome, econ: &EconomicParams) -> Money {
    match outcome {
        SimulationOutcome::Completed(profile) => npv(profile, econ),
        SimulationOutcome::FlowLimitViolation { .. } => Money::NEG_INFINITY,
    }
}
