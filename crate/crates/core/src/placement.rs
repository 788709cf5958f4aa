//! Well-placement objective: decode a coordinate vector into wells, apply
//! the death penalty, simulate, price.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use crate::de::{Evaluation, Objective, ProblemBounds};
use crate::economics::{penalized_npv, EconomicParams, Money};
use crate::error::{Error, Result};
use crate::flow::{
    simulate, ControlSchedule, FluidProps, Reservoir, SimulationSettings, WellKind, WellSpec,
};
use crate::grid::Grid;

/// Minimum spacing between any two wells, m.
pub const MIN_WELL_DISTANCE: f64 = 250.0;

/// Rounds one coordinate to a cell index (half away from zero) and clamps it
/// into `1..=n`.
pub fn decode_coordinate(v: f64, n: usize) -> usize {
    (v.round().max(1.0) as usize).min(n)
}

/// Decodes `[x1, y1, x2, y2, ...]` into 1-based cells.
pub fn decode_cells(x: &[f64], grid: &Grid) -> Vec<(usize, usize)> {
    x.chunks_exact(2)
        .map(|p| {
            (
                decode_coordinate(p[0], grid.nx),
                decode_coordinate(p[1], grid.ny),
            )
        })
        .collect()
}

/// Smallest center-to-center distance between the decoded wells, m.
/// Infinite for fewer than two wells.
pub fn min_well_distance(x: &[f64], grid: &Grid, n_wells: usize) -> f64 {
    assert_eq!(
        x.len(),
        2 * n_wells,
        "candidate length must be twice the well count"
    );
    let centers: Vec<(f64, f64)> = decode_cells(x, grid)
        .into_iter()
        .map(|(i, j)| ((i as f64 - 0.5) * grid.dx, (j as f64 - 0.5) * grid.dy))
        .collect();
    let mut best = f64::INFINITY;
    for a in 0..centers.len() {
        for b in a + 1..centers.len() {
            let d = (centers[a].0 - centers[b].0).hypot(centers[a].1 - centers[b].1);
            best = best.min(d);
        }
    }
    best
}

/// Everything about a well except where it goes.
#[derive(Debug, Clone, PartialEq)]
pub struct WellTemplate {
    pub id: String,
    pub kind: WellKind,
    pub r_w: f64,
    pub bhp_by_interval: Vec<f64>,
}

impl WellTemplate {
    pub fn place(&self, cell: (usize, usize)) -> WellSpec {
        WellSpec {
            id: self.id.clone(),
            kind: self.kind,
            cell,
            r_w: self.r_w,
            bhp_by_interval: self.bhp_by_interval.clone(),
        }
    }
}

/// The evaluation context of one case: reservoir, fluids, schedule,
/// economics and constraints.
#[derive(Debug)]
pub struct PlacementProblem {
    reservoir: Arc<Reservoir>,
    pub fluid: FluidProps,
    pub schedule: ControlSchedule,
    pub economics: EconomicParams,
    pub settings: SimulationSettings,
    pub min_distance: f64,
    pub wells: Vec<WellTemplate>,
    simulations: AtomicUsize,
    /// Penalized NPV by decoded layout. The simulator is deterministic, so a
    /// layout seen before is not simulated again.
    memo: Mutex<HashMap<Vec<(usize, usize)>, Money>>,
}

impl Clone for PlacementProblem {
    fn clone(&self) -> Self {
        PlacementProblem {
            reservoir: Arc::clone(&self.reservoir),
            fluid: self.fluid,
            schedule: self.schedule,
            economics: self.economics,
            settings: self.settings,
            min_distance: self.min_distance,
            wells: self.wells.clone(),
            simulations: AtomicUsize::new(0),
            memo: Mutex::default(),
        }
    }
}

impl PlacementProblem {
    pub fn new(
        reservoir: Arc<Reservoir>,
        fluid: FluidProps,
        schedule: ControlSchedule,
        economics: EconomicParams,
        settings: SimulationSettings,
        min_distance: f64,
        wells: Vec<WellTemplate>,
    ) -> Result<Self> {
        fluid.validate()?;
        schedule.validate()?;
        economics.validate()?;
        if wells.is_empty() {
            return Err(Error::Config(
                "placement problem needs at least one well".into(),
            ));
        }
        let n_intervals = schedule.n_intervals()?;
        for w in &wells {
            w.place((1, 1)).validate(reservoir.grid(), n_intervals)?;
        }
        Ok(PlacementProblem {
            reservoir,
            fluid,
            schedule,
            economics,
            settings,
            min_distance,
            wells,
            simulations: AtomicUsize::new(0),
            memo: Mutex::default(),
        })
    }

    pub fn reservoir(&self) -> &Reservoir {
        &self.reservoir
    }

    pub fn grid(&self) -> &Grid {
        self.reservoir.grid()
    }

    /// `[1, nx] x [1, ny]` for every well.
    pub fn bounds(&self) -> ProblemBounds {
        let g = self.grid();
        let lower = vec![1.0; 2 * self.wells.len()];
        let upper = (0..self.wells.len())
            .flat_map(|_| [g.nx as f64, g.ny as f64])
            .collect();
        ProblemBounds::new(lower, upper).expect("grid has at least 2x2 cells")
    }

    /// Number of simulator runs so far; repeated layouts are answered from
    /// memory and not counted.
    pub fn simulations(&self) -> usize {
        self.simulations.load(Ordering::Relaxed)
    }

    pub fn place_wells(&self, x: &[f64]) -> Vec<WellSpec> {
        decode_cells(x, self.grid())
            .into_iter()
            .zip(&self.wells)
            .map(|(cell, t)| t.place(cell))
            .collect()
    }

    /// Death-penalized NPV of a candidate.
    ///
    /// Too-close wells get `NEG_INFINITY` without running the simulator; a
    /// flow-limit breach during simulation does too.
    pub fn evaluate_candidate(&self, x: &[f64]) -> Result<Evaluation> {
        if x.len() != 2 * self.wells.len() {
            return Err(Error::Validation(format!(
                "candidate has {} coordinates, expected {}",
                x.len(),
                2 * self.wells.len()
            )));
        }
        if min_well_distance(x, self.grid(), self.wells.len()) < self.min_distance {
            return Ok(Evaluation {
                fitness: Money::NEG_INFINITY,
                simulated: false,
            });
        }
        let cells = decode_cells(x, self.grid());
        let known = self.memo.lock().expect("memo lock").get(&cells).copied();
        let fitness = match known {
            Some(f) => f,
            None => {
                self.simulations.fetch_add(1, Ordering::Relaxed);
                let outcome = simulate(
                    &self.reservoir,
                    &self.fluid,
                    &self.place_wells(x),
                    &self.schedule,
                    &self.settings,
                )?;
                let f = penalized_npv(&outcome, &self.economics);
                self.memo.lock().expect("memo lock").insert(cells, f);
                f
            }
        };
        Ok(Evaluation {
            fitness,
            simulated: true,
        })
    }
}

impl Objective for PlacementProblem {
    fn evaluate(&self, x: &[f64]) -> Result<Evaluation> {
        self.evaluate_candidate(x)
    }
}
