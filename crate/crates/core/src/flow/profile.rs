use std::fmt::Write as _;

use crate::flow::well::WellKind;
use crate::format::sig6;

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileWell {
    pub id: String,
    pub kind: WellKind,
}

/// Rate magnitudes of one well over one step, m³/day. Producers fill `oil`
/// and `water`, injectors fill `injection`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WellRate {
    pub oil: f64,
    pub water: f64,
    pub injection: f64,
}

impl WellRate {
    pub fn magnitude(&self) -> f64 {
        self.oil + self.water + self.injection
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileStep {
    pub start_days: f64,
    pub dt_days: f64,
    /// Step-averaged rates, one per well.
    pub rates: Vec<WellRate>,
    pub shut_in: Vec<bool>,
    /// Largest well rate magnitude seen by the step's pressure solve, m³/day.
    pub max_rate: f64,
}

/// Piecewise-constant well rates over the production horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductionProfile {
    pub wells: Vec<ProfileWell>,
    pub steps: Vec<ProfileStep>,
}

impl ProductionProfile {
    /// Cumulative injected and produced volumes, m³.
    pub fn cumulative_volumes(&self) -> (f64, f64) {
        let mut injected = 0.0;
        let mut produced = 0.0;
        for step in &self.steps {
            for r in &step.rates {
                injected += r.injection * step.dt_days;
                produced += (r.oil + r.water) * step.dt_days;
            }
        }
        (injected, produced)
    }

    /// CSV with one row per step: `time_days` (step start), `dt_days`, rate
    /// columns `<id>_oil_m3d`/`<id>_water_m3d` for producers and
    /// `<id>_inj_m3d` for injectors, then `<id>_shut` flags (0/1).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time_days,dt_days");
        for w in &self.wells {
            match w.kind {
                WellKind::Producer => write!(out, ",{0}_oil_m3d,{0}_water_m3d", w.id),
                WellKind::Injector => write!(out, ",{}_inj_m3d", w.id),
            }
            .unwrap();
        }
        for w in &self.wells {
            write!(out, ",{}_shut", w.id).unwrap();
        }
        out.push('\n');
        for step in &self.steps {
            write!(out, "{},{}", sig6(step.start_days), sig6(step.dt_days)).unwrap();
            for (w, r) in self.wells.iter().zip(&step.rates) {
                match w.kind {
                    WellKind::Producer => write!(out, ",{},{}", sig6(r.oil), sig6(r.water)),
                    WellKind::Injector => write!(out, ",{}", sig6(r.injection)),
                }
                .unwrap();
            }
            for &s in &step.shut_in {
                write!(out, ",{}", u8::from(s)).unwrap();
            }
            out.push('\n');
        }
        out
    }
}
