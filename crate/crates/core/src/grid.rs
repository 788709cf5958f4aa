//! Reservoir geometry and rock property fields.
//!
//! Cells are addressed externally by 1-based `(i, j)` pairs and stored in
//! x-fastest order, the same layout SPE10 data files use.

use std::io::Read;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::FOOT;

/// Layer thickness of the SPE10 model (2 ft).
pub const SPE10_LAYER_THICKNESS: f64 = 2.0 * FOOT;

/// Cartesian 2D grid with a single layer of thickness `dz`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, dx: f64, dy: f64, dz: f64) -> Result<Self> {
        let grid = Grid { nx, ny, dx, dy, dz };
        grid.validate()?;
        Ok(grid)
    }

    /// The 60 x 50 grid of 32 m cells used for the full-size cases.
    pub fn full_size() -> Self {
        Grid {
            nx: 60,
            ny: 50,
            dx: 32.0,
            dy: 32.0,
            dz: SPE10_LAYER_THICKNESS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::Validation(format!(
                "grid needs at least one cell in each direction, got {}x{}",
                self.nx, self.ny
            )));
        }
        for (name, v) in [("dx", self.dx), ("dy", self.dy), ("dz", self.dz)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    /// Field extent `(nx*dx, ny*dy)` in meters.
    pub fn extent(&self) -> (f64, f64) {
        (self.nx as f64 * self.dx, self.ny as f64 * self.dy)
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx * self.dy * self.dz
    }

    /// Linear index of the 1-based cell `(i, j)`.
    pub fn index(&self, i: usize, j: usize) -> Result<usize> {
        self.check_cell(i, j)?;
        Ok((i - 1) + self.nx * (j - 1))
    }

    /// Inverse of [`Grid::index`].
    pub fn cell_of(&self, index: usize) -> (usize, usize) {
        (index % self.nx + 1, index / self.nx + 1)
    }

    pub fn check_cell(&self, i: usize, j: usize) -> Result<()> {
        if i < 1 || i > self.nx || j < 1 || j > self.ny {
            return Err(Error::Bounds(format!(
                "cell ({i}, {j}) outside grid 1..={} x 1..={}",
                self.nx, self.ny
            )));
        }
        Ok(())
    }

    /// Center of cell `(i, j)` in meters, measured from the grid corner.
    ///
    /// ```
    /// use wellplace::grid::Grid;
    /// let grid = Grid::full_size();
    /// assert_eq!(grid.cell_center(1, 1).unwrap(), (16.0, 16.0));
    /// ```
    pub fn cell_center(&self, i: usize, j: usize) -> Result<(f64, f64)> {
        self.check_cell(i, j)?;
        Ok(((i as f64 - 0.5) * self.dx, (j as f64 - 0.5) * self.dy))
    }
}

/// Per-cell porosity and horizontal permeability (mD).
#[derive(Debug, Clone, PartialEq)]
pub struct RockField {
    grid: Grid,
    porosity: Vec<f64>,
    perm_x: Vec<f64>,
    perm_y: Vec<f64>,
}

impl RockField {
    pub fn new(grid: Grid, porosity: Vec<f64>, perm_x: Vec<f64>, perm_y: Vec<f64>) -> Result<Self> {
        grid.validate()?;
        let n = grid.cell_count();
        for (name, len) in [
            ("porosity", porosity.len()),
            ("perm_x", perm_x.len()),
            ("perm_y", perm_y.len()),
        ] {
            if len != n {
                return Err(Error::Validation(format!(
                    "{name} has {len} values, grid has {n} cells"
                )));
            }
        }
        if let Some((c, &k)) = perm_x
            .iter()
            .chain(&perm_y)
            .enumerate()
            .find(|(_, &k)| !(k > 0.0 && k.is_finite()))
        {
            return Err(Error::Validation(format!(
                "permeability must be positive, got {k} at value {}",
                c % n
            )));
        }
        if let Some((c, &p)) = porosity
            .iter()
            .enumerate()
            .find(|(_, &p)| !(p > 0.0 && p <= 1.0))
        {
            return Err(Error::Validation(format!(
                "porosity must lie in (0, 1], got {p} at cell {c}"
            )));
        }
        Ok(RockField {
            grid,
            porosity,
            perm_x,
            perm_y,
        })
    }

    /// Uniform isotropic field.
    pub fn homogeneous(grid: Grid, porosity: f64, perm: f64) -> Result<Self> {
        let n = grid.cell_count();
        Self::new(grid, vec![porosity; n], vec![perm; n], vec![perm; n])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn porosity(&self) -> &[f64] {
        &self.porosity
    }

    pub fn perm_x(&self) -> &[f64] {
        &self.perm_x
    }

    pub fn perm_y(&self) -> &[f64] {
        &self.perm_y
    }

    /// Pore volume of every cell in m³.
    pub fn pore_volumes(&self) -> Vec<f64> {
        let v = self.grid.cell_volume();
        self.porosity.iter().map(|p| p * v).collect()
    }

    /// Extracts a sub-rectangle as a new field on a grid with the same cell
    /// sizes. Only `i_offset`, `j_offset`, `width` and `height` of the window
    /// are used; the layer index is meaningless for an already 2D field.
    pub fn window(&self, window: &FieldWindow) -> Result<RockField> {
        window.check_fits(self.grid.nx, self.grid.ny, 1)?;
        let grid = Grid {
            nx: window.width,
            ny: window.height,
            ..self.grid
        };
        let pick = |src: &[f64]| {
            let mut out = Vec::with_capacity(window.width * window.height);
            for j in 0..window.height {
                let row = (window.j_offset + j) * self.grid.nx + window.i_offset;
                out.extend_from_slice(&src[row..row + window.width]);
            }
            out
        };
        RockField::new(
            grid,
            pick(&self.porosity),
            pick(&self.perm_x),
            pick(&self.perm_y),
        )
    }
}

/// Rectangular sub-region of one layer of a larger dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldWindow {
    /// 1-based layer index.
    pub layer: usize,
    pub i_offset: usize,
    pub j_offset: usize,
    pub width: usize,
    pub height: usize,
}

impl FieldWindow {
    /// Window anchored at the origin of layer 3.
    pub fn at_origin(width: usize, height: usize) -> Self {
        FieldWindow {
            layer: 3,
            i_offset: 0,
            j_offset: 0,
            width,
            height,
        }
    }

    fn check_fits(&self, nx: usize, ny: usize, nz: usize) -> Result<()> {
        if self.layer < 1
            || self.layer > nz
            || self.width == 0
            || self.height == 0
            || self.i_offset + self.width > nx
            || self.j_offset + self.height > ny
        {
            return Err(Error::Bounds(format!(
                "window {self:?} does not fit a {nx}x{ny}x{nz} dataset"
            )));
        }
        Ok(())
    }
}

/// Dimensions of an SPE10-layout dataset, normally read from a sidecar TOML
/// file next to the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spe10Dims {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl Spe10Dims {
    /// The full SPE10 model 2 dimensions.
    pub const FULL_MODEL: Spe10Dims = Spe10Dims {
        nx: 60,
        ny: 220,
        nz: 85,
    };

    pub fn cells(&self) -> usize {
        self.nx * self.ny * self.nz
    }
}

/// Parses whitespace-separated decimals, tracking positions for diagnostics.
pub fn parse_values(mut source: impl Read) -> Result<Vec<f64>> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| Error::io("<spe10 source>", e))?;
    let mut values = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let mut rest = line;
        let mut consumed = 0;
        while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
            let tail = &rest[start..];
            let len = tail.find(char::is_whitespace).unwrap_or(tail.len());
            let token = &tail[..len];
            let value: f64 = token.parse().map_err(|_| Error::Parse {
                line: line_no + 1,
                column: consumed + start + 1,
                token: token.to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line: line_no + 1,
                    column: consumed + start + 1,
                    token: token.to_string(),
                });
            }
            values.push(value);
            consumed += start + len;
            rest = &tail[len..];
        }
    }
    Ok(values)
}

/// Loads one windowed layer of an SPE10-layout dataset onto `grid`.
///
/// `perm` holds either one block of values (isotropic) or the `kx`, `ky`[, `kz`]
/// blocks in sequence, each block covering the full `dims` in x-fastest,
/// then y, then z order. `kz` is ignored. `poro` holds one block of
/// porosities; without it every cell gets `default_porosity`. Values are kept
/// exactly as parsed (mD and fractions).
pub fn load_spe10_layer(
    perm: impl Read,
    poro: Option<&mut dyn Read>,
    dims: Spe10Dims,
    window: &FieldWindow,
    grid: Grid,
    default_porosity: f64,
) -> Result<RockField> {
    grid.validate()?;
    window.check_fits(dims.nx, dims.ny, dims.nz)?;
    if grid.nx != window.width || grid.ny != window.height {
        return Err(Error::Bounds(format!(
            "window {}x{} does not match grid {}x{}",
            window.width, window.height, grid.nx, grid.ny
        )));
    }
    let block = dims.cells();
    let perm_values = parse_values(perm)?;
    let n_values = perm_values.len();
    let (kx, ky) = if n_values == block {
        (&perm_values[..], &perm_values[..])
    } else if n_values == 2 * block || n_values == 3 * block {
        (&perm_values[..block], &perm_values[block..2 * block])
    } else {
        return Err(Error::Validation(format!(
            "permeability source has {n_values} values; expected 1, 2 or 3 blocks of {block}"
        )));
    };
    let porosity = match poro {
        Some(src) => {
            let values = parse_values(src)?;
            if values.len() != block {
                return Err(Error::Validation(format!(
                    "porosity source has {} values, expected {block}",
                    values.len()
                )));
            }
            Some(values)
        }
        None => None,
    };

    let layer_base = (window.layer - 1) * dims.nx * dims.ny;
    let cells = window.width * window.height;
    let mut out_kx = Vec::with_capacity(cells);
    let mut out_ky = Vec::with_capacity(cells);
    let mut out_phi = Vec::with_capacity(cells);
    for j in 0..window.height {
        for i in 0..window.width {
            let src = layer_base + (window.j_offset + j) * dims.nx + window.i_offset + i;
            out_kx.push(kx[src]);
            out_ky.push(ky[src]);
            out_phi.push(porosity.as_ref().map_or(default_porosity, |p| p[src]));
        }
    }
    RockField::new(grid, out_phi, out_kx, out_ky)
}

fn write_block(out: &mut String, values: &[f64], per_line: usize) {
    for chunk in values.chunks(per_line) {
        let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
}

/// Serializes a field as SPE10-layout text: the permeability text holds the
/// `kx` then `ky` blocks, the porosity text one block. Numbers are written in
/// shortest round-trip form so re-loading reproduces them exactly.
pub fn to_spe10_text(field: &RockField) -> (String, String) {
    let per_line = field.grid.nx.clamp(1, 6);
    let mut perm = String::new();
    write_block(&mut perm, &field.perm_x, per_line);
    write_block(&mut perm, &field.perm_y, per_line);
    let mut poro = String::new();
    write_block(&mut poro, &field.porosity, per_line);
    (perm, poro)
}

/// Parameters of a synthetic log-normal permeability field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticField {
    pub seed: u64,
    /// Mean of ln(k / mD).
    pub log_mean: f64,
    /// Standard deviation of ln(k / mD) before smoothing.
    pub log_sigma: f64,
    /// Half-width of the box filter, in cells.
    pub smoothing_radius: usize,
}

const POROSITY_MIN: f64 = 0.05;
const POROSITY_MAX: f64 = 0.35;

/// Generates a correlated log-normal permeability field.
///
/// Standard normal deviates are box-averaged over a `(2r+1)²` window
/// (truncated at the edges) and scaled by `log_sigma` around `log_mean`.
/// Porosity follows log-permeability linearly over `[0.05, 0.35]`.
pub fn generate_synthetic_field(spec: &SyntheticField, grid: Grid) -> Result<RockField> {
    grid.validate()?;
    if !(spec.log_sigma >= 0.0 && spec.log_sigma.is_finite()) || !spec.log_mean.is_finite() {
        return Err(Error::Validation(format!(
            "synthetic field needs finite log_mean and log_sigma >= 0, got {} and {}",
            spec.log_mean, spec.log_sigma
        )));
    }
    let (nx, ny) = (grid.nx, grid.ny);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise: Vec<f64> = (0..nx * ny)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let smoothed = box_smooth(&noise, nx, ny, spec.smoothing_radius);

    let log_perm: Vec<f64> = smoothed
        .iter()
        .map(|z| spec.log_mean + spec.log_sigma * z)
        .collect();
    let perm: Vec<f64> = log_perm.iter().map(|l| l.exp()).collect();

    let lo = log_perm.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = log_perm.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let porosity = log_perm
        .iter()
        .map(|l| {
            let t = if hi > lo { (l - lo) / (hi - lo) } else { 0.5 };
            POROSITY_MIN + (POROSITY_MAX - POROSITY_MIN) * t
        })
        .collect();
    RockField::new(grid, porosity, perm.clone(), perm)
}

/// Box filter with edge truncation, `values` in x-fastest order.
pub(crate) fn box_smooth(values: &[f64], nx: usize, ny: usize, radius: usize) -> Vec<f64> {
    if radius == 0 {
        return values.to_vec();
    }
    let mut out = vec![0.0; values.len()];
    for j in 0..ny {
        let (j0, j1) = (j.saturating_sub(radius), (j + radius).min(ny - 1));
        for i in 0..nx {
            let (i0, i1) = (i.saturating_sub(radius), (i + radius).min(nx - 1));
            let mut sum = 0.0;
            for jj in j0..=j1 {
                sum += values[jj * nx + i0..=jj * nx + i1].iter().sum::<f64>();
            }
            out[j * nx + i] = sum / ((i1 - i0 + 1) * (j1 - j0 + 1)) as f64;
        }
    }
    out
}
