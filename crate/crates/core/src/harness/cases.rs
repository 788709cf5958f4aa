//! The three optimization cases and their desk-scale variants.

use std::fmt;
use std::fs::File;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::economics::EconomicParams;
use crate::error::{Error, Result};
use crate::flow::{
    ControlSchedule, FluidProps, Reservoir, ShutInPolicy, SimulationSettings, WellKind,
    DEFAULT_WELLBORE_RADIUS,
};
use crate::grid::{
    generate_synthetic_field, load_spe10_layer, FieldWindow, Grid, RockField, Spe10Dims,
    SyntheticField, SPE10_LAYER_THICKNESS,
};
use crate::placement::{PlacementProblem, WellTemplate, MIN_WELL_DISTANCE};

/// Rate cap of Case 3, m³/day.
pub const CASE3_FLOW_LIMIT: f64 = 1000.0;

/// Cells per side of the desk-scale grid.
pub const MINI_GRID_CELLS: usize = 20;

/// Cell edge of both the full and desk-scale grids, m.
pub const CELL_SIZE: f64 = 32.0;

/// Synthetic stand-in for the SPE10 window on the full grid.
pub const FULL_SYNTHETIC_FIELD: SyntheticField = SyntheticField {
    seed: 10,
    log_mean: 4.0,
    log_sigma: 1.5,
    smoothing_radius: 3,
};

/// Field of the desk-scale cases.
pub const MINI_SYNTHETIC_FIELD: SyntheticField = SyntheticField {
    seed: 20,
    log_mean: 4.0,
    log_sigma: 1.5,
    smoothing_radius: 2,
};

/// Case 1, 2 or 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    /// No rate limit, 10% interest.
    Case1,
    /// No rate limit, no discounting.
    Case2,
    /// 1,000 m³/day rate limit, 10% interest.
    Case3,
}

impl CaseId {
    pub fn number(self) -> u8 {
        match self {
            CaseId::Case1 => 1,
            CaseId::Case2 => 2,
            CaseId::Case3 => 3,
        }
    }

    pub fn from_number(n: i64) -> Result<Self> {
        match n {
            1 => Ok(CaseId::Case1),
            2 => Ok(CaseId::Case2),
            3 => Ok(CaseId::Case3),
            other => Err(Error::Config(format!(
                "case must be 1, 2 or 3, got {other}"
            ))),
        }
    }

    pub fn interest_rate(self) -> f64 {
        match self {
            CaseId::Case2 => 0.0,
            _ => 0.10,
        }
    }

    pub fn flow_limit(self) -> Option<f64> {
        match self {
            CaseId::Case3 => Some(CASE3_FLOW_LIMIT),
            _ => None,
        }
    }
}

/// A case together with its scale: `case2`, `case3-mini`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CaseRepr", into = "String")]
pub struct CaseSelection {
    pub id: CaseId,
    pub mini: bool,
}

/// Either a bare case number or a name such as `case1-mini`.
#[derive(Deserialize)]
#[serde(untagged)]
enum CaseRepr {
    Number(i64),
    Name(String),
}

impl TryFrom<CaseRepr> for CaseSelection {
    type Error = Error;

    fn try_from(r: CaseRepr) -> Result<Self> {
        match r {
            CaseRepr::Number(n) => Ok(CaseSelection {
                id: CaseId::from_number(n)?,
                mini: false,
            }),
            CaseRepr::Name(s) => s.parse(),
        }
    }
}

impl From<CaseSelection> for String {
    fn from(s: CaseSelection) -> String {
        s.to_string()
    }
}

impl fmt::Display for CaseSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case{}", self.id.number())?;
        if self.mini {
            f.write_str("-mini")?;
        }
        Ok(())
    }
}

impl FromStr for CaseSelection {
    type Err = Error;

    /// Accepts `1`, `case1`, `case1-mini` and the like.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Config(format!(
                "unknown case `{s}`; expected 1..3 or case1..case3[-mini]"
            ))
        };
        let (body, mini) = match s.strip_suffix("-mini") {
            Some(b) => (b, true),
            None => (s, false),
        };
        let digits = body.strip_prefix("case").unwrap_or(body);
        let n: i64 = digits.parse().map_err(|_| bad())?;
        Ok(CaseSelection {
            id: CaseId::from_number(n).map_err(|_| bad())?,
            mini,
        })
    }
}

/// Where the rock properties come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RockSource {
    Synthetic {
        seed: u64,
        log_mean: f64,
        log_sigma: f64,
        smoothing_radius: usize,
    },
    /// One layer of an SPE10-layout dataset cut to the case grid.
    Spe10 {
        perm: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        poro: Option<PathBuf>,
        #[serde(default = "full_model")]
        dims: Spe10Dims,
        window: FieldWindow,
        #[serde(default = "default_porosity")]
        default_porosity: f64,
    },
}

fn full_model() -> Spe10Dims {
    Spe10Dims::FULL_MODEL
}

fn default_porosity() -> f64 {
    0.2
}

impl From<SyntheticField> for RockSource {
    fn from(s: SyntheticField) -> Self {
        RockSource::Synthetic {
            seed: s.seed,
            log_mean: s.log_mean,
            log_sigma: s.log_sigma,
            smoothing_radius: s.smoothing_radius,
        }
    }
}

impl RockSource {
    /// Checks that referenced files exist and the window fits the grid.
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        match self {
            RockSource::Synthetic { .. } => Ok(()),
            RockSource::Spe10 {
                perm, poro, window, ..
            } => {
                for path in std::iter::once(perm).chain(poro) {
                    if !path.is_file() {
                        return Err(Error::io(
                            path,
                            std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
                        ));
                    }
                }
                if (window.width, window.height) != (grid.nx, grid.ny) {
                    return Err(Error::Config(format!(
                        "rock window is {}x{} but the case grid is {}x{}",
                        window.width, window.height, grid.nx, grid.ny
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn load(&self, grid: Grid) -> Result<RockField> {
        match self {
            &RockSource::Synthetic {
                seed,
                log_mean,
                log_sigma,
                smoothing_radius,
            } => generate_synthetic_field(
                &SyntheticField {
                    seed,
                    log_mean,
                    log_sigma,
                    smoothing_radius,
                },
                grid,
            ),
            RockSource::Spe10 {
                perm,
                poro,
                dims,
                window,
                default_porosity,
            } => {
                let open = |p: &PathBuf| File::open(p).map_err(|e| Error::io(p, e));
                let perm_file = std::io::BufReader::new(open(perm)?);
                let mut poro_file = match poro {
                    Some(p) => Some(std::io::BufReader::new(open(p)?)),
                    None => None,
                };
                load_spe10_layer(
                    perm_file,
                    poro_file.as_mut().map(|f| f as &mut dyn std::io::Read),
                    *dims,
                    window,
                    grid,
                    *default_porosity,
                )
            }
        }
    }
}

/// Bottom-hole pressures per control interval, bar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlPlan {
    pub injector_bhp: Vec<f64>,
    pub producer_bhp: Vec<f64>,
}

impl ControlPlan {
    /// Injectors at 450 bar and producers at 100 bar throughout: the widest
    /// pressure difference the operating ranges allow.
    pub fn max_drawdown(n_intervals: usize) -> Self {
        ControlPlan {
            injector_bhp: vec![450.0; n_intervals],
            producer_bhp: vec![100.0; n_intervals],
        }
    }
}

/// Everything that defines one optimization case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSpec {
    pub selection: CaseSelection,
    pub grid: Grid,
    pub rock: RockSource,
    pub fluid: FluidProps,
    pub schedule: ControlSchedule,
    pub economics: EconomicParams,
    pub flow_limit: Option<f64>,
    pub shut_in: ShutInPolicy,
    pub min_distance: f64,
    pub controls: ControlPlan,
    pub wellbore_radius: f64,
}

impl CaseSpec {
    /// The full-size case: 60x50 cells of 32 m, two injectors, two producers.
    pub fn full(id: CaseId) -> Self {
        Self::build(
            CaseSelection { id, mini: false },
            Grid::full_size(),
            FULL_SYNTHETIC_FIELD,
        )
    }

    /// The desk-scale case: 20x20 cells of 32 m, everything else unchanged.
    pub fn mini(id: CaseId) -> Self {
        let grid = Grid::new(
            MINI_GRID_CELLS,
            MINI_GRID_CELLS,
            CELL_SIZE,
            CELL_SIZE,
            SPE10_LAYER_THICKNESS,
        )
        .expect("mini grid is valid");
        Self::build(CaseSelection { id, mini: true }, grid, MINI_SYNTHETIC_FIELD)
    }

    pub fn from_selection(selection: CaseSelection) -> Self {
        if selection.mini {
            Self::mini(selection.id)
        } else {
            Self::full(selection.id)
        }
    }

    fn build(selection: CaseSelection, grid: Grid, field: SyntheticField) -> Self {
        let schedule = ControlSchedule::default();
        let n_intervals = schedule.n_intervals().expect("default schedule is valid");
        CaseSpec {
            selection,
            grid,
            rock: field.into(),
            fluid: FluidProps::default(),
            schedule,
            economics: EconomicParams {
                r: selection.id.interest_rate(),
                ..EconomicParams::default()
            },
            flow_limit: selection.id.flow_limit(),
            shut_in: ShutInPolicy::PerProducer,
            min_distance: MIN_WELL_DISTANCE,
            controls: ControlPlan::max_drawdown(n_intervals),
            wellbore_radius: DEFAULT_WELLBORE_RADIUS,
        }
    }

    pub fn name(&self) -> String {
        self.selection.to_string()
    }

    /// Checks the case-defining invariants and every parameter block.
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.fluid.validate()?;
        self.schedule.validate()?;
        self.economics.validate()?;
        let id = self.selection.id;
        if self.economics.r != id.interest_rate() || self.flow_limit != id.flow_limit() {
            return Err(Error::Config(format!(
                "case {} requires r = {} and flow limit {:?}",
                id.number(),
                id.interest_rate(),
                id.flow_limit()
            )));
        }
        let n = self.schedule.n_intervals()?;
        for (name, bhp) in [
            ("injector_bhp", &self.controls.injector_bhp),
            ("producer_bhp", &self.controls.producer_bhp),
        ] {
            if bhp.len() != n {
                return Err(Error::Config(format!(
                    "{name} has {} entries but the schedule has {n} control intervals",
                    bhp.len()
                )));
            }
        }
        for t in self.well_templates() {
            t.place((1, 1)).check_operating_range()?;
        }
        if !(self.min_distance >= 0.0) {
            return Err(Error::Config(format!(
                "minimum well distance must be >= 0, got {}",
                self.min_distance
            )));
        }
        self.rock.validate(&self.grid)
    }

    /// Injectors `I1`, `I2` then producers `P1`, `P2`.
    pub fn well_templates(&self) -> Vec<WellTemplate> {
        let make = |id: &str, kind, bhp: &Vec<f64>| WellTemplate {
            id: id.into(),
            kind,
            r_w: self.wellbore_radius,
            bhp_by_interval: bhp.clone(),
        };
        vec![
            make("I1", WellKind::Injector, &self.controls.injector_bhp),
            make("I2", WellKind::Injector, &self.controls.injector_bhp),
            make("P1", WellKind::Producer, &self.controls.producer_bhp),
            make("P2", WellKind::Producer, &self.controls.producer_bhp),
        ]
    }

    pub fn settings(&self) -> SimulationSettings {
        SimulationSettings {
            flow_limit: self.flow_limit,
            water_cut_threshold: self.economics.water_cut_threshold,
            shut_in: self.shut_in,
        }
    }

    /// Loads the rock and assembles the evaluation context.
    pub fn build_problem(&self) -> Result<PlacementProblem> {
        self.validate()?;
        let rock = self.rock.load(self.grid)?;
        PlacementProblem::new(
            Arc::new(Reservoir::new(&rock)),
            self.fluid,
            self.schedule,
            self.economics,
            self.settings(),
            self.min_distance,
            self.well_templates(),
        )
    }
}
