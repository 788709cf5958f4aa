use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::DAYS_PER_YEAR;

/// Production horizon, control intervals and time-step sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSchedule {
    pub horizon_years: f64,
    pub interval_years: f64,
    /// Upper bound on the pressure step, days. Steps are shortened so each
    /// control interval holds a whole number of equal steps.
    pub pressure_step_days: f64,
    /// Fraction of the transport CFL limit used for sub-steps, in (0, 1].
    pub max_transport_cfl: f64,
}

impl Default for ControlSchedule {
    fn default() -> Self {
        ControlSchedule {
            horizon_years: 10.0,
            interval_years: 2.0,
            pressure_step_days: 30.0,
            max_transport_cfl: 0.9,
        }
    }
}

/// One pressure step of the simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureStep {
    /// 0-based control interval.
    pub interval: usize,
    pub start_days: f64,
    pub dt_days: f64,
}

impl ControlSchedule {
    pub fn n_intervals(&self) -> Result<usize> {
        if !(self.horizon_years > 0.0 && self.interval_years > 0.0) {
            return Err(Error::Validation(
                "horizon and interval must be positive".into(),
            ));
        }
        let ratio = self.horizon_years / self.interval_years;
        let n = ratio.round();
        if (ratio - n).abs() > 1e-9 * ratio.max(1.0) || n < 1.0 {
            return Err(Error::Validation(format!(
                "horizon of {} years is not a whole number of {}-year intervals",
                self.horizon_years, self.interval_years
            )));
        }
        Ok(n as usize)
    }

    pub fn validate(&self) -> Result<()> {
        self.n_intervals()?;
        if !(self.pressure_step_days > 0.0 && self.pressure_step_days.is_finite()) {
            return Err(Error::Validation("pressure step must be positive".into()));
        }
        if !(self.max_transport_cfl > 0.0 && self.max_transport_cfl <= 1.0) {
            return Err(Error::Validation(format!(
                "transport CFL fraction must lie in (0, 1], got {}",
                self.max_transport_cfl
            )));
        }
        Ok(())
    }

    pub fn horizon_days(&self) -> f64 {
        self.horizon_years * DAYS_PER_YEAR
    }

    /// All pressure steps in time order.
    pub fn steps(&self) -> Result<Vec<PressureStep>> {
        self.validate()?;
        let n_intervals = self.n_intervals()?;
        let interval_days = self.interval_years * DAYS_PER_YEAR;
        let per_interval = (interval_days / self.pressure_step_days - 1e-9)
            .ceil()
            .max(1.0) as usize;
        let dt = interval_days / per_interval as f64;
        let mut steps = Vec::with_capacity(n_intervals * per_interval);
        for interval in 0..n_intervals {
            for k in 0..per_interval {
                steps.push(PressureStep {
                    interval,
                    start_days: interval as f64 * interval_days + k as f64 * dt,
                    dt_days: dt,
                });
            }
        }
        Ok(steps)
    }
}
