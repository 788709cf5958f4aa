//! Experiment configuration files.
//!
//! ```toml
//! case = 1              # 1..3, or "case2", "case1-mini", ...
//! config = 6            # built-in configuration 1..8, or a [config] table with explicit parameters
//! out = "results/case1-config6"
//! trials = 30           # default 30
//! seed = 42             # trial t uses seed + t; default 42
//! ```
//!
//! Optional keys: `jobs`, `mini`, `charge_penalties`, `[rock]`,
//! `[controls]`. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wellplace::de::{DeConfig, Strategy};
use wellplace::harness::{
    builtin_config, mini_config, CaseSelection, CaseSpec, ControlPlan, RockSource,
};
use wellplace::{Error, Result};

pub const DEFAULT_TRIALS: usize = 30;
pub const DEFAULT_SEED: u64 = 42;

/// A built-in configuration (1..8) or explicit DE parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeChoice {
    Builtin(usize),
    Explicit(ExplicitDe),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitDe {
    pub pop_size: usize,
    pub f: f64,
    pub cr: f64,
    pub strategy: Strategy,
    pub budget: usize,
}

impl DeChoice {
    /// Label used in the exported tables.
    pub fn label(&self) -> String {
        match self {
            DeChoice::Builtin(k) => k.to_string(),
            DeChoice::Explicit(_) => "custom".into(),
        }
    }
}

fn default_trials() -> usize {
    DEFAULT_TRIALS
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_true() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub case: CaseSelection,
    pub config: DeChoice,
    pub out: PathBuf,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Worker threads; all cores when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    /// Run the desk-scale variant of `case`.
    #[serde(default, skip_serializing_if = "is_false")]
    pub mini: bool,
    /// Whether layouts rejected without simulation use up budget.
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    pub charge_penalties: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rock: Option<RockSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub controls: Option<ControlPlan>,
}

impl ExperimentConfig {
    /// A configuration with every optional field at its default.
    pub fn new(case: CaseSelection, config: DeChoice, out: PathBuf) -> Self {
        ExperimentConfig {
            case,
            config,
            out,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            jobs: None,
            mini: false,
            charge_penalties: true,
            rock: None,
            controls: None,
        }
    }

    /// Parses a TOML document. Syntax errors, unknown keys, missing
    /// required keys and type mismatches are all `config` errors.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let mut msg = e.message().trim().to_string();
            if let Some(span) = e.span() {
                let line = text[..span.start].matches('\n').count() + 1;
                msg = format!("line {line}: {msg}");
            }
            Error::Config(msg)
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment config serializes")
    }

    /// The case after applying `mini`.
    pub fn selection(&self) -> CaseSelection {
        CaseSelection {
            mini: self.case.mini || self.mini,
            ..self.case
        }
    }

    pub fn case_spec(&self) -> CaseSpec {
        let mut case = CaseSpec::from_selection(self.selection());
        if let Some(rock) = &self.rock {
            case.rock = rock.clone();
        }
        if let Some(controls) = &self.controls {
            case.controls = controls.clone();
        }
        case
    }

    /// DE parameters; builtin rows are scaled down on desk-scale cases.
    pub fn de_config(&self) -> Result<DeConfig> {
        let config = match self.config {
            DeChoice::Builtin(k) if self.selection().mini => mini_config(k)?,
            DeChoice::Builtin(k) => builtin_config(k)?,
            DeChoice::Explicit(e) => DeConfig {
                pop_size: e.pop_size,
                f: e.f,
                cr: e.cr,
                strategy: e.strategy,
                budget: e.budget,
                seed: 0,
                charge_penalties: true,
            },
        };
        let config = DeConfig {
            seed: self.seed,
            charge_penalties: self.charge_penalties,
            ..config
        };
        config.validate()?;
        Ok(config)
    }

    /// Checks everything a run needs without running it, including that
    /// referenced files exist.
    pub fn validate(&self) -> Result<(CaseSpec, DeConfig)> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        if self.out.as_os_str().is_empty() {
            return Err(Error::Config("out must name a directory".into()));
        }
        let de = self.de_config()?;
        let case = self.case_spec();
        case.validate()?;
        Ok((case, de))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wellplace::harness::CaseId;

    #[test]
    fn minimal_document_gets_defaults() {
        let c = ExperimentConfig::parse("case = 1\nconfig = 6\nout = \"./r\"\n").unwrap();
        assert_eq!(
            (c.trials, c.seed, c.jobs, c.mini, c.charge_penalties),
            (30, 42, None, false, true)
        );
        let (case, de) = c.validate().unwrap();
        assert_eq!(case, CaseSpec::full(CaseId::Case1));
        assert_eq!(
            (de.pop_size, de.cr, de.f, de.budget, de.seed),
            (100, 0.9, 0.5, 10_000, 42)
        );
    }

    #[test]
    fn mini_scales_builtin_rows() {
        let c = ExperimentConfig::parse("case = \"case1-mini\"\nconfig = 3\nout = \"r\"").unwrap();
        let de = c.de_config().unwrap();
        assert_eq!((de.pop_size, de.budget), (40, 2_000));
        let c = ExperimentConfig::parse("case = 2\nmini = true\nconfig = 6\nout = \"r\"").unwrap();
        assert_eq!(c.case_spec().name(), "case2-mini");
    }

    #[test]
    fn explicit_parameters() {
        let text = "case = 3\nout = \"r\"\n[config]\npop_size = 12\nf = 0.7\ncr = 0.8\nstrategy = \"rand/1\"\nbudget = 500\n";
        let c = ExperimentConfig::parse(text).unwrap();
        let de = c.de_config().unwrap();
        assert_eq!(
            (de.pop_size, de.budget, de.strategy),
            (12, 500, Strategy::Rand1)
        );
        assert_eq!(c.config.label(), "custom");
    }

    #[test]
    fn errors_name_the_problem() {
        let err =
            ExperimentConfig::parse("case = 1\nconfig = 6\nout = \"r\"\nfoo = 3\n").unwrap_err();
        assert!(err.to_string().contains("foo"), "{err}");
        let err = ExperimentConfig::parse("case = 1\nconfig = 6\n").unwrap_err();
        assert!(err.to_string().contains("out"), "{err}");
        let err = ExperimentConfig::parse("case = 1\nout = \"r\"\n").unwrap_err();
        assert!(err.to_string().contains("config"), "{err}");
        let err = ExperimentConfig::parse("case = 1\nconfig = 6\nout = \"r\"\ntrials = \"x\"")
            .unwrap_err();
        assert!(
            err.to_string().contains("trials") || err.to_string().contains("line 4"),
            "{err}"
        );
        let c = ExperimentConfig::parse("case = 1\nconfig = 9\nout = \"r\"").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn round_trip() {
        let text = "case = \"case3-mini\"\nconfig = 2\nout = \"x/y\"\ntrials = 5\nseed = 7\njobs = 2\ncharge_penalties = false\n\
                    [controls]\ninjector_bhp = [400.0, 400.0, 400.0, 400.0, 400.0]\nproducer_bhp = [150.0, 150.0, 150.0, 150.0, 150.0]\n\
                    [rock]\nkind = \"synthetic\"\nseed = 3\nlog_mean = 4.5\nlog_sigma = 1.0\nsmoothing_radius = 2\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(ExperimentConfig::parse(&c.to_toml()).unwrap(), c);
        c.validate().unwrap();
    }
}
