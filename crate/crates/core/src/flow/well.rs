use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Bottom-hole pressure window allowed for injectors, bar.
pub const INJECTOR_BHP_RANGE: (f64, f64) = (275.0, 450.0);
/// Bottom-hole pressure window allowed for producers, bar.
pub const PRODUCER_BHP_RANGE: (f64, f64) = (100.0, 250.0);
/// Wellbore radius used when none is given, m.
pub const DEFAULT_WELLBORE_RADIUS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WellKind {
    Injector,
    Producer,
}

/// A vertical, pressure-controlled well.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WellSpec {
    pub id: String,
    pub kind: WellKind,
    /// 1-based `(i, j)` host cell.
    pub cell: (usize, usize),
    /// Wellbore radius, m.
    pub r_w: f64,
    /// Bottom-hole pressure per control interval, bar.
    pub bhp_by_interval: Vec<f64>,
}

impl WellSpec {
    /// Checks placement and that every interval has a positive BHP.
    pub fn validate(&self, grid: &Grid, n_intervals: usize) -> Result<()> {
        grid.check_cell(self.cell.0, self.cell.1)?;
        if !(self.r_w > 0.0 && self.r_w.is_finite()) {
            return Err(Error::Validation(format!(
                "well {}: wellbore radius must be positive, got {}",
                self.id, self.r_w
            )));
        }
        if self.bhp_by_interval.len() != n_intervals {
            return Err(Error::Validation(format!(
                "well {}: {} BHP values for {n_intervals} control intervals",
                self.id,
                self.bhp_by_interval.len()
            )));
        }
        if let Some(p) = self
            .bhp_by_interval
            .iter()
            .find(|p| !(**p > 0.0 && p.is_finite()))
        {
            return Err(Error::Validation(format!(
                "well {}: BHP must be positive, got {p}",
                self.id
            )));
        }
        Ok(())
    }

    /// Checks the BHP schedule against the operating windows
    /// [`INJECTOR_BHP_RANGE`] and [`PRODUCER_BHP_RANGE`].
    pub fn check_operating_range(&self) -> Result<()> {
        let (lo, hi) = match self.kind {
            WellKind::Injector => INJECTOR_BHP_RANGE,
            WellKind::Producer => PRODUCER_BHP_RANGE,
        };
        match self
            .bhp_by_interval
            .iter()
            .find(|p| !(lo..=hi).contains(*p))
        {
            Some(p) => Err(Error::Validation(format!(
                "well {}: BHP {p} bar outside [{lo}, {hi}]",
                self.id
            ))),
            None => Ok(()),
        }
    }
}

/// Peaceman equivalent radius `r_e` of a cell, m.
pub fn peaceman_equivalent_radius(grid: &Grid, kx: f64, ky: f64) -> f64 {
    let ratio = ky / kx;
    let num = (ratio.sqrt() * grid.dx * grid.dx + ratio.recip().sqrt() * grid.dy * grid.dy).sqrt();
    0.28 * num / (ratio.powf(0.25) + ratio.recip().powf(0.25))
}

/// Peaceman well index in mD·m for a vertical well through one cell.
///
/// `WI = 2π sqrt(kx ky) dz / ln(r_e / r_w)`; multiply by [`crate::units::MILLIDARCY`]
/// for m³.
pub fn peaceman_well_index(grid: &Grid, kx: f64, ky: f64, r_w: f64) -> Result<f64> {
    if !(kx > 0.0 && ky > 0.0 && r_w > 0.0) {
        return Err(Error::Validation(format!(
            "well index needs positive kx, ky, r_w; got {kx}, {ky}, {r_w}"
        )));
    }
    let r_e = peaceman_equivalent_radius(grid, kx, ky);
    if r_w >= r_e {
        return Err(Error::WellGeometry { r_w, r_e });
    }
    Ok(2.0 * std::f64::consts::PI * (kx * ky).sqrt() * grid.dz / (r_e / r_w).ln())
}
