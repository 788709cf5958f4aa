//! Explicit upwind saturation transport.

use crate::error::{Error, Result};
use crate::flow::fluid::FluidProps;
use crate::flow::pressure::{FaceFluxes, Reservoir};

/// Accepted saturation overshoot from rounding.
pub const SATURATION_TOLERANCE: f64 = 1e-12;

/// A well's source term for transport: positive `rate` injects water,
/// negative removes fluid at the cell's fractional flow. m³/day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellSource {
    pub cell: usize,
    pub rate: f64,
}

/// Total inflow (faces plus injection) into every cell, m³/day.
fn cell_inflow(reservoir: &Reservoir, fluxes: &FaceFluxes, wells: &[WellSource]) -> Vec<f64> {
    let mut inflow = vec![0.0; reservoir.grid().cell_count()];
    for (a, b, q) in reservoir.face_fluxes(fluxes) {
        if q > 0.0 {
            inflow[b] += q;
        } else {
            inflow[a] -= q;
        }
    }
    for w in wells {
        if w.rate > 0.0 {
            inflow[w.cell] += w.rate;
        }
    }
    inflow
}

/// Largest stable time step in days: `min_i PV_i / (max f' * inflow_i)`.
/// Infinite when nothing flows.
pub fn max_stable_dt(
    reservoir: &Reservoir,
    fluxes: &FaceFluxes,
    wells: &[WellSource],
    max_dfw: f64,
) -> f64 {
    cell_inflow(reservoir, fluxes, wells)
        .iter()
        .zip(reservoir.pore_volume())
        .filter(|(q, _)| **q > 0.0)
        .map(|(q, pv)| pv / (max_dfw * q))
        .fold(f64::INFINITY, f64::min)
}

/// Advances water saturation by `dt` days under fixed fluxes.
///
/// The update is conservative: each face moves `flux * f_w(upwind)` of water,
/// injectors add pure water, producers remove `rate * f_w(cell)`.
pub fn transport_step(
    reservoir: &Reservoir,
    fluid: &FluidProps,
    s_w: &[f64],
    fluxes: &FaceFluxes,
    wells: &[WellSource],
    dt: f64,
) -> Result<Vec<f64>> {
    let dt_max = max_stable_dt(
        reservoir,
        fluxes,
        wells,
        fluid.max_fractional_flow_derivative(),
    );
    if dt > dt_max * (1.0 + 1e-12) {
        return Err(Error::CflViolation { dt, dt_max });
    }
    let mut next = s_w.to_vec();
    TransportKernel::new(reservoir, fluid, fluxes, wells).advance(&mut next, dt)?;
    Ok(next)
}

/// The fluxes of one pressure step flattened for repeated sub-steps.
/// Does not check the time step; callers size it from [`max_stable_dt`].
/// Kept out of line: inlined into [`TransportKernel::advance`] this loop
/// compiles to something several times slower.
#[inline(never)]
fn fill_fractional_flow(fluid: &FluidProps, s_w: &[f64], out: &mut [f64]) {
    if fluid.is_quadratic() {
        for (f, &s) in out.iter_mut().zip(s_w) {
            let (w, o) = fluid.quadratic_mobility(s);
            *f = w / (w + o);
        }
    } else {
        for (f, &s) in out.iter_mut().zip(s_w) {
            *f = fluid.fractional_flow(s);
        }
    }
}

pub(crate) struct TransportKernel<'a> {
    fluid: &'a FluidProps,
    /// `(upwind, downwind, |flux|)` for every face that carries flow.
    faces: Vec<(u32, u32, f64)>,
    wells: &'a [WellSource],
    inv_pore_volume: Vec<f64>,
    fw: Vec<f64>,
    water: Vec<f64>,
}

impl<'a> TransportKernel<'a> {
    pub(crate) fn new(
        reservoir: &'a Reservoir,
        fluid: &'a FluidProps,
        fluxes: &FaceFluxes,
        wells: &'a [WellSource],
    ) -> Self {
        let n = reservoir.grid().cell_count();
        TransportKernel {
            fluid,
            faces: reservoir
                .face_fluxes(fluxes)
                .filter(|f| f.2 != 0.0)
                .map(|(a, b, q)| {
                    if q > 0.0 {
                        (a as u32, b as u32, q)
                    } else {
                        (b as u32, a as u32, -q)
                    }
                })
                .collect(),
            wells,
            inv_pore_volume: reservoir.pore_volume().iter().map(|v| 1.0 / v).collect(),
            fw: vec![0.0; n],
            water: vec![0.0; n],
        }
    }

    pub(crate) fn advance(&mut self, s_w: &mut [f64], dt: f64) -> Result<()> {
        fill_fractional_flow(self.fluid, s_w, &mut self.fw);
        self.water.fill(0.0);
        let (fw, water) = (&self.fw, &mut self.water);
        for &(up, down, q) in &self.faces {
            let moved = q * fw[up as usize];
            water[up as usize] -= moved;
            water[down as usize] += moved;
        }
        for w in self.wells {
            water[w.cell] += if w.rate > 0.0 {
                w.rate
            } else {
                w.rate * fw[w.cell]
            };
        }

        let (lower, upper) = (self.fluid.s_wr, 1.0 - self.fluid.s_or);
        for (cell, ((s, dw), inv_pv)) in s_w
            .iter_mut()
            .zip(water.iter())
            .zip(&self.inv_pore_volume)
            .enumerate()
        {
            let value = *s + dt * dw * inv_pv;
            let snapped = if value < lower && value >= lower - SATURATION_TOLERANCE {
                lower
            } else if value > upper && value <= upper + SATURATION_TOLERANCE {
                upper
            } else {
                value
            };
            if !(lower..=upper).contains(&snapped) {
                return Err(Error::SaturationOvershoot {
                    cell,
                    value,
                    lower,
                    upper,
                });
            }
            *s = snapped;
        }
        Ok(())
    }
}
