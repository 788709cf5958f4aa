//! Incompressible pressure equation, two-point flux approximation.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::flow::fluid::FluidProps;
use crate::flow::linalg::SpdPattern;
use crate::grid::{Grid, RockField};
use crate::units::{BAR, CENTIPOISE, DAY, MILLIDARCY};

/// Relative residual the pressure solve must reach.
pub const PRESSURE_TOLERANCE: f64 = 1e-8;

/// Converts `transmissibility [m³] * mobility [1/cp]` into m³/(day·bar).
const FLOW_SCALE: f64 = BAR * DAY / CENTIPOISE;

/// Per-cell pressure and water saturation.
#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirState {
    /// bar
    pub pressure: Vec<f64>,
    pub s_w: Vec<f64>,
}

impl ReservoirState {
    pub fn uniform(cells: usize, pressure: f64, s_w: f64) -> Self {
        ReservoirState {
            pressure: vec![pressure; cells],
            s_w: vec![s_w; cells],
        }
    }
}

/// Volumetric fluxes across interior faces, m³/day, positive towards +x / +y.
///
/// `x[j * (nx - 1) + i]` joins cells `(i, j)` and `(i + 1, j)` (0-based);
/// `y[j * nx + i]` joins `(i, j)` and `(i, j + 1)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FaceFluxes {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// A well as seen by one pressure solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellControl {
    /// Linear cell index.
    pub cell: usize,
    /// Peaceman index, mD·m.
    pub index: f64,
    /// Bottom-hole pressure, bar.
    pub bhp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressureSolution {
    /// bar
    pub pressure: Vec<f64>,
    pub fluxes: FaceFluxes,
    /// Signed rates in m³/day, positive into the reservoir, one per well.
    pub well_rates: Vec<f64>,
    pub relative_residual: f64,
}

/// An interior face: the two cells it joins, the slot of its matrix entry
/// and the transmissibility in m³ (permeability times area over distance).
/// Faces are stored x-faces first, as in [`FaceFluxes`].
#[derive(Debug, Clone, Copy)]
struct Face {
    left: u32,
    right: u32,
    slot: u32,
    trans: f64,
}

/// Geometry-derived quantities reused by every pressure and transport step.
#[derive(Debug, Clone)]
pub struct Reservoir {
    grid: Grid,
    faces: Vec<Face>,
    n_x_faces: usize,
    pattern: Arc<SpdPattern>,
    pore_volume: Vec<f64>,
    perm_x: Vec<f64>,
    perm_y: Vec<f64>,
}

impl Reservoir {
    pub fn new(rock: &RockField) -> Self {
        let g = *rock.grid();
        let (nx, ny) = (g.nx, g.ny);
        let kx = rock.perm_x();
        let ky = rock.perm_y();
        // Half-cell transmissibilities joined harmonically.
        let half_x = |c: usize| kx[c] * MILLIDARCY * g.dy * g.dz / (0.5 * g.dx);
        let half_y = |c: usize| ky[c] * MILLIDARCY * g.dx * g.dz / (0.5 * g.dy);
        let harmonic = |a: f64, b: f64| a * b / (a + b);
        let mut faces = Vec::with_capacity((nx - 1) * ny + nx * (ny - 1));
        for j in 0..ny {
            for i in 0..nx - 1 {
                let c = j * nx + i;
                faces.push((c, c + 1, harmonic(half_x(c), half_x(c + 1))));
            }
        }
        let n_x_faces = faces.len();
        for j in 0..ny - 1 {
            for i in 0..nx {
                let c = j * nx + i;
                faces.push((c, c + nx, harmonic(half_y(c), half_y(c + nx))));
            }
        }
        let pairs: Vec<(usize, usize)> = faces.iter().map(|&(a, b, _)| (a, b)).collect();
        let (pattern, slots) =
            SpdPattern::new(g.cell_count(), &pairs).expect("five-point pattern is well formed");
        let faces = faces
            .into_iter()
            .zip(slots)
            .map(|((a, b, trans), slot)| Face {
                left: a as u32,
                right: b as u32,
                slot: slot as u32,
                trans,
            })
            .collect();
        Reservoir {
            grid: g,
            faces,
            n_x_faces,
            pattern: Arc::new(pattern),
            pore_volume: rock.pore_volumes(),
            perm_x: kx.to_vec(),
            perm_y: ky.to_vec(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Pore volumes, m³.
    pub fn pore_volume(&self) -> &[f64] {
        &self.pore_volume
    }

    pub fn perm(&self, cell: usize) -> (f64, f64) {
        (self.perm_x[cell], self.perm_y[cell])
    }

    /// Iterates faces with their current flux: `(left, right, flux)`.
    pub(crate) fn face_fluxes<'a>(
        &'a self,
        fluxes: &'a FaceFluxes,
    ) -> impl Iterator<Item = (usize, usize, f64)> + 'a {
        self.faces
            .iter()
            .zip(fluxes.x.iter().chain(&fluxes.y))
            .map(|(f, &q)| (f.left as usize, f.right as usize, q))
    }
}

/// Total mobility of every cell. Out of line for the same reason as the
/// fractional-flow loop in transport.
#[inline(never)]
fn total_mobilities(fluid: &FluidProps, s_w: &[f64]) -> Vec<f64> {
    if fluid.is_quadratic() {
        s_w.iter()
            .map(|&s| {
                let (w, o) = fluid.quadratic_mobility(s);
                w + o
            })
            .collect()
    } else {
        s_w.iter().map(|&s| fluid.total_mobility(s)).collect()
    }
}

/// Solves the incompressible pressure equation for the given wells.
///
/// Face mobilities are taken from the upwind cell of `upwind_from` when a
/// previous flux field is supplied and the face carried flow; otherwise the
/// two cell mobilities are averaged arithmetically. Well terms are
/// `q = WI * lambda_t * (p_bh - p_cell)` with the host cell's total mobility.
pub fn solve_pressure(
    reservoir: &Reservoir,
    fluid: &FluidProps,
    state: &ReservoirState,
    wells: &[WellControl],
    upwind_from: Option<&FaceFluxes>,
) -> Result<PressureSolution> {
    if wells.is_empty() {
        return Err(Error::SingularSystem);
    }
    let g = reservoir.grid;
    let n = g.cell_count();
    let mobility = total_mobilities(fluid, &state.s_w);
    if let Some(c) = mobility.iter().position(|m| !(*m > 0.0)) {
        return Err(Error::Validation(format!(
            "total mobility vanishes in cell {c}"
        )));
    }

    let n_xf = reservoir.n_x_faces;
    let previous = upwind_from.map(|f| f.x.iter().chain(&f.y));
    let average = |f: &Face| 0.5 * (mobility[f.left as usize] + mobility[f.right as usize]);
    let coeff: Vec<f64> = match previous {
        Some(q) => reservoir
            .faces
            .iter()
            .zip(q)
            .map(|(f, &q)| {
                let lambda = if q > 0.0 {
                    mobility[f.left as usize]
                } else if q < 0.0 {
                    mobility[f.right as usize]
                } else {
                    average(f)
                };
                f.trans * lambda * FLOW_SCALE
            })
            .collect(),
        None => reservoir
            .faces
            .iter()
            .map(|f| f.trans * average(f) * FLOW_SCALE)
            .collect(),
    };

    let well_coeff: Vec<f64> = wells
        .iter()
        .map(|w| w.index * MILLIDARCY * mobility[w.cell] * FLOW_SCALE)
        .collect();

    let pattern = &reservoir.pattern;
    let mut values = vec![0.0; pattern.nnz()];
    let mut rhs = vec![0.0; n];
    for (f, &c) in reservoir.faces.iter().zip(&coeff) {
        values[pattern.diagonal_slot(f.left as usize)] += c;
        values[pattern.diagonal_slot(f.right as usize)] += c;
        values[f.slot as usize] -= c;
    }
    for (w, &c) in wells.iter().zip(&well_coeff) {
        values[pattern.diagonal_slot(w.cell)] += c;
        rhs[w.cell] += c * w.bhp;
    }
    let mut pressure = rhs;
    pattern.solve(&values, &mut pressure)?;

    let mut residual: Vec<f64> = vec![0.0; n];
    let mut rhs_norm = 0.0;
    for (w, &c) in wells.iter().zip(&well_coeff) {
        residual[w.cell] += c * (w.bhp - pressure[w.cell]);
        rhs_norm += (c * w.bhp).powi(2);
    }
    let mut flux = Vec::with_capacity(coeff.len());
    for (f, &c) in reservoir.faces.iter().zip(&coeff) {
        let (a, b) = (f.left as usize, f.right as usize);
        let q = c * (pressure[a] - pressure[b]);
        residual[a] -= q;
        residual[b] += q;
        flux.push(q);
    }
    let fluxes = FaceFluxes {
        y: flux.split_off(n_xf),
        x: flux,
    };
    let relative_residual =
        residual.iter().map(|r| r * r).sum::<f64>().sqrt() / rhs_norm.sqrt().max(f64::MIN_POSITIVE);
    if !(relative_residual <= PRESSURE_TOLERANCE) {
        return Err(Error::SolverNonConvergence {
            residual: relative_residual,
        });
    }

    let well_rates = wells
        .iter()
        .zip(&well_coeff)
        .map(|(w, &c)| c * (w.bhp - pressure[w.cell]))
        .collect();
    Ok(PressureSolution {
        pressure,
        fluxes,
        well_rates,
        relative_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::well::peaceman_well_index;
    use approx::assert_relative_eq;

    fn wells_for(res: &Reservoir, specs: &[((usize, usize), f64)]) -> Vec<WellControl> {
        specs
            .iter()
            .map(|&((i, j), bhp)| {
                let cell = res.grid().index(i, j).unwrap();
                let (kx, ky) = res.perm(cell);
                WellControl {
                    cell,
                    index: peaceman_well_index(res.grid(), kx, ky, 0.1).unwrap(),
                    bhp,
                }
            })
            .collect()
    }

    #[test]
    fn equal_bhp_is_equilibrium() {
        let grid = Grid::new(6, 5, 32.0, 32.0, 0.6096).unwrap();
        let rock = RockField::homogeneous(grid, 0.2, 100.0).unwrap();
        let res = Reservoir::new(&rock);
        let state = ReservoirState::uniform(30, 260.0, 0.2);
        let wells = wells_for(&res, &[((1, 1), 300.0), ((6, 5), 300.0)]);
        let sol = solve_pressure(&res, &FluidProps::default(), &state, &wells, None).unwrap();
        for p in &sol.pressure {
            assert!((p - 300.0).abs() < 1e-9);
        }
        for q in &sol.well_rates {
            assert!(q.abs() < 1e-9);
        }
    }

    #[test]
    fn two_cell_network_matches_hand_solution() {
        let grid = Grid::new(2, 1, 32.0, 32.0, 0.6096).unwrap();
        let rock = RockField::homogeneous(grid, 0.2, 100.0).unwrap();
        let res = Reservoir::new(&rock);
        let fluid = FluidProps::default();
        let state = ReservoirState::uniform(2, 260.0, 0.2);
        let wells = wells_for(&res, &[((1, 1), 300.0), ((2, 1), 100.0)]);
        let sol = solve_pressure(&res, &fluid, &state, &wells, None).unwrap();

        // Series resistors: well 1, face, well 2.
        let lambda = fluid.total_mobility(0.2) / CENTIPOISE;
        let k = 100.0 * MILLIDARCY;
        let t_face = k * 32.0 * 0.6096 / 32.0;
        let wi = peaceman_well_index(&grid, 100.0, 100.0, 0.1).unwrap() * MILLIDARCY;
        let conductance = 1.0 / (2.0 / (wi * lambda) + 1.0 / (t_face * lambda));
        let q = conductance * 200.0 * BAR * DAY;
        assert_relative_eq!(sol.well_rates[0], q, max_relative = 1e-10);
        assert_relative_eq!(sol.well_rates[1], -q, max_relative = 1e-10);
        assert_relative_eq!(sol.fluxes.x[0], q, max_relative = 1e-10);
        let p1 = 300.0 - q / (wi * lambda * BAR * DAY);
        assert_relative_eq!(sol.pressure[0], p1, max_relative = 1e-12);
    }

    #[test]
    fn no_wells_is_singular() {
        let grid = Grid::new(3, 3, 10.0, 10.0, 1.0).unwrap();
        let rock = RockField::homogeneous(grid, 0.2, 50.0).unwrap();
        let res = Reservoir::new(&rock);
        let state = ReservoirState::uniform(9, 260.0, 0.2);
        assert!(matches!(
            solve_pressure(&res, &FluidProps::default(), &state, &[], None),
            Err(Error::SingularSystem)
        ));
    }

    #[test]
    fn wide_heterogeneous_grid() {
        let grid = Grid::new(9, 3, 20.0, 30.0, 1.0).unwrap();
        let perm: Vec<f64> = (0..27).map(|c| 10.0 + 7.0 * c as f64).collect();
        let rock = RockField::new(grid, vec![0.2; 27], perm.clone(), perm).unwrap();
        let res = Reservoir::new(&rock);
        let state = ReservoirState::uniform(27, 260.0, 0.3);
        let wells = wells_for(&res, &[((1, 2), 400.0), ((9, 3), 120.0), ((5, 1), 150.0)]);
        let sol = solve_pressure(&res, &FluidProps::default(), &state, &wells, None).unwrap();
        let total: f64 = sol.well_rates.iter().sum();
        let scale: f64 = sol.well_rates.iter().map(|q| q.abs()).sum();
        assert!(total.abs() <= 1e-9 * scale);
        assert!(sol.relative_residual < 1e-12);
        assert!(sol
            .pressure
            .iter()
            .all(|p| (120.0 - 1e-9..=400.0 + 1e-9).contains(p)));
    }
}
