//! Two-phase incompressible oil/water simulator.
//!
//! Each pressure step solves the pressure equation once (TPFA, Peaceman
//! wells under BHP control) and then advances saturation with as many
//! explicit upwind sub-steps as the CFL limit requires.

mod fluid;
pub mod linalg;
mod pressure;
mod profile;
mod schedule;
mod transport;
mod well;

pub use fluid::FluidProps;
pub use pressure::{
    solve_pressure, FaceFluxes, PressureSolution, Reservoir, ReservoirState, WellControl,
    PRESSURE_TOLERANCE,
};
pub use profile::{ProductionProfile, ProfileStep, ProfileWell, WellRate};
pub use schedule::{ControlSchedule, PressureStep};
use transport::TransportKernel;
pub use transport::{max_stable_dt, transport_step, WellSource, SATURATION_TOLERANCE};
pub use well::{
    peaceman_equivalent_radius, peaceman_well_index, WellKind, WellSpec, DEFAULT_WELLBORE_RADIUS,
    INJECTOR_BHP_RANGE, PRODUCER_BHP_RANGE,
};

use serde::{Deserialize, Serialize};

use crate::economics::water_cut;
use crate::error::Result;

/// Initial reservoir pressure, bar.
pub const INITIAL_PRESSURE: f64 = 260.0;

/// Rates smaller than this (m³/day) are treated as no flow when deciding
/// whether a well crossflows.
const CROSSFLOW_TOLERANCE: f64 = 1e-6;

/// What happens when a producer's water cut exceeds the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShutInPolicy {
    /// Shut that producer for the rest of the run.
    #[default]
    PerProducer,
    /// End the whole simulation.
    WholeField,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationSettings {
    /// Maximum allowed well rate magnitude, m³/day.
    pub flow_limit: Option<f64>,
    pub water_cut_threshold: f64,
    pub shut_in: ShutInPolicy,
}

impl Default for SimulationSettings {
    fn default() -> Self {
        SimulationSettings {
            flow_limit: None,
            water_cut_threshold: 0.78,
            shut_in: ShutInPolicy::PerProducer,
        }
    }
}

/// Result of a simulation run. A flow-limit breach is an outcome, not an error.
#[derive(Debug, Clone, PartialEq)]
pub enum SimulationOutcome {
    Completed(ProductionProfile),
    FlowLimitViolation {
        time_days: f64,
        /// Index into the well list.
        well: usize,
        /// m³/day
        rate: f64,
    },
}

impl SimulationOutcome {
    pub fn profile(&self) -> Option<&ProductionProfile> {
        match self {
            SimulationOutcome::Completed(p) => Some(p),
            SimulationOutcome::FlowLimitViolation { .. } => None,
        }
    }
}

/// Optional per-step observer, used by tests to check invariants as the run
/// progresses.
pub trait StepObserver {
    fn pressure_solved(
        &mut self,
        _step: &PressureStep,
        _solution: &PressureSolution,
        _active: &[usize],
    ) {
    }
    fn transport_advanced(&mut self, _s_w: &[f64]) {}
}

impl StepObserver for () {}

/// Runs the full schedule.
pub fn simulate(
    reservoir: &Reservoir,
    fluid: &FluidProps,
    wells: &[WellSpec],
    schedule: &ControlSchedule,
    settings: &SimulationSettings,
) -> Result<SimulationOutcome> {
    simulate_observed(reservoir, fluid, wells, schedule, settings, &mut ())
}

pub fn simulate_observed(
    reservoir: &Reservoir,
    fluid: &FluidProps,
    wells: &[WellSpec],
    schedule: &ControlSchedule,
    settings: &SimulationSettings,
    observer: &mut dyn StepObserver,
) -> Result<SimulationOutcome> {
    fluid.validate()?;
    let steps = schedule.steps()?;
    let n_intervals = schedule.n_intervals()?;
    let grid = reservoir.grid();
    let mut cells = Vec::with_capacity(wells.len());
    let mut indices = Vec::with_capacity(wells.len());
    for w in wells {
        w.validate(grid, n_intervals)?;
        let cell = grid.index(w.cell.0, w.cell.1)?;
        let (kx, ky) = reservoir.perm(cell);
        cells.push(cell);
        indices.push(peaceman_well_index(grid, kx, ky, w.r_w)?);
    }

    let max_dfw = fluid.max_fractional_flow_derivative();
    let mut state = ReservoirState::uniform(grid.cell_count(), INITIAL_PRESSURE, fluid.s_w_init);
    let mut shut = vec![false; wells.len()];
    let mut previous_fluxes: Option<FaceFluxes> = None;
    let mut previous_rates: Option<Vec<WellRate>> = None;
    let mut profile = ProductionProfile {
        wells: wells
            .iter()
            .map(|w| ProfileWell {
                id: w.id.clone(),
                kind: w.kind,
            })
            .collect(),
        steps: Vec::with_capacity(steps.len()),
    };

    'steps: for step in &steps {
        if let Some(rates) = &previous_rates {
            for (k, w) in wells.iter().enumerate() {
                if w.kind != WellKind::Producer || shut[k] {
                    continue;
                }
                if water_cut(rates[k].water, rates[k].oil) > settings.water_cut_threshold {
                    match settings.shut_in {
                        ShutInPolicy::PerProducer => shut[k] = true,
                        ShutInPolicy::WholeField => break 'steps,
                    }
                }
            }
        }

        let mut rates = vec![WellRate::default(); wells.len()];
        // Wells closed for this step only because their flow reversed.
        let mut closed = shut.clone();
        let solution = loop {
            let active: Vec<usize> = (0..wells.len()).filter(|&k| !closed[k]).collect();
            if active.is_empty() {
                break None;
            }
            let controls: Vec<WellControl> = active
                .iter()
                .map(|&k| WellControl {
                    cell: cells[k],
                    index: indices[k],
                    bhp: wells[k].bhp_by_interval[step.interval],
                })
                .collect();
            let sol = solve_pressure(
                reservoir,
                fluid,
                &state,
                &controls,
                previous_fluxes.as_ref(),
            )?;
            let reversed: Vec<usize> = active
                .iter()
                .zip(&sol.well_rates)
                .filter(|(&k, &q)| match wells[k].kind {
                    WellKind::Injector => q < -CROSSFLOW_TOLERANCE,
                    WellKind::Producer => q > CROSSFLOW_TOLERANCE,
                })
                .map(|(&k, _)| k)
                .collect();
            if reversed.is_empty() {
                break Some((active, sol));
            }
            for k in reversed {
                closed[k] = true;
            }
        };

        let Some((active, solution)) = solution else {
            profile.steps.push(ProfileStep {
                start_days: step.start_days,
                dt_days: step.dt_days,
                rates,
                shut_in: shut.clone(),
                max_rate: 0.0,
            });
            previous_rates = Some(vec![WellRate::default(); wells.len()]);
            continue;
        };
        observer.pressure_solved(step, &solution, &active);

        let mut max_rate: f64 = 0.0;
        for (&k, &q) in active.iter().zip(&solution.well_rates) {
            let magnitude = q.abs();
            if let Some(limit) = settings.flow_limit {
                if magnitude > limit {
                    return Ok(SimulationOutcome::FlowLimitViolation {
                        time_days: step.start_days,
                        well: k,
                        rate: magnitude,
                    });
                }
            }
            max_rate = max_rate.max(magnitude);
        }

        let sources: Vec<WellSource> = active
            .iter()
            .zip(&solution.well_rates)
            .map(|(&k, &rate)| WellSource {
                cell: cells[k],
                rate,
            })
            .collect();
        let dt_max = max_stable_dt(reservoir, &solution.fluxes, &sources, max_dfw);
        let dt_cap = schedule.max_transport_cfl * dt_max;
        let substeps = if dt_cap.is_finite() {
            (step.dt_days / dt_cap).ceil().max(1.0) as usize
        } else {
            1
        };
        let dt = step.dt_days / substeps as f64;
        let mut kernel = TransportKernel::new(reservoir, fluid, &solution.fluxes, &sources);
        for _ in 0..substeps {
            for (&k, src) in active.iter().zip(&sources) {
                if src.rate > 0.0 {
                    rates[k].injection += src.rate * dt;
                } else {
                    let fw = fluid.fractional_flow(state.s_w[src.cell]);
                    rates[k].water -= src.rate * fw * dt;
                    rates[k].oil -= src.rate * (1.0 - fw) * dt;
                }
            }
            kernel.advance(&mut state.s_w, dt)?;
            observer.transport_advanced(&state.s_w);
        }
        for r in &mut rates {
            r.oil /= step.dt_days;
            r.water /= step.dt_days;
            r.injection /= step.dt_days;
        }

        state.pressure = solution.pressure;
        previous_fluxes = Some(solution.fluxes);
        previous_rates = Some(rates.clone());
        profile.steps.push(ProfileStep {
            start_days: step.start_days,
            dt_days: step.dt_days,
            rates,
            shut_in: shut.clone(),
            max_rate,
        });
    }
    Ok(SimulationOutcome::Completed(profile))
}
