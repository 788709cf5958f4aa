//! The `run`, `report`, `gen-field` and `validate` commands.

use std::fs;
use std::path::{Path, PathBuf};

use wellplace::format::sig6;
use wellplace::grid::{generate_synthetic_field, to_spe10_text, Grid, SyntheticField};
use wellplace::harness::{
    export_results, read_finals, run_trials, summary_from_finals, FINALS_FILE, SUMMARY_FILE,
};
use wellplace::{Error, Result};

use crate::experiment::{DeChoice, ExperimentConfig};

/// Command-line values that override (or replace) a configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub case: Option<String>,
    pub de_config: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub mini: bool,
}

/// Loads `config` if given and applies the overrides on top. Without a
/// file, `--case`, `--de-config` and `--out` are required.
pub fn resolve(config: Option<&Path>, o: &Overrides) -> Result<ExperimentConfig> {
    let mut c = match config {
        Some(path) => ExperimentConfig::load(path)?,
        None => {
            let missing = |flag: &str| Error::Config(format!("missing {flag} (or pass --config)"));
            let case = o
                .case
                .as_deref()
                .ok_or_else(|| missing("--case"))?
                .parse()?;
            let k = o.de_config.ok_or_else(|| missing("--de-config"))?;
            let out = o.out.clone().ok_or_else(|| missing("--out"))?;
            ExperimentConfig::new(case, DeChoice::Builtin(k), out)
        }
    };
    if let Some(case) = &o.case {
        c.case = case.parse()?;
    }
    if let Some(k) = o.de_config {
        c.config = DeChoice::Builtin(k);
    }
    if let Some(t) = o.trials {
        c.trials = t;
    }
    if let Some(s) = o.seed {
        c.seed = s;
    }
    if let Some(out) = &o.out {
        c.out = out.clone();
    }
    if let Some(j) = o.jobs {
        c.jobs = Some(j);
    }
    c.mini |= o.mini;
    Ok(c)
}

pub fn validate(config: &ExperimentConfig) -> Result<String> {
    let (case, de) = config.validate()?;
    Ok(format!(
        "ok: {} with configuration {} (N={}, F={}, CR={}, {}, budget {}), {} trials from seed {}",
        case.name(),
        config.config.label(),
        de.pop_size,
        de.f,
        de.cr,
        de.strategy,
        de.budget,
        config.trials,
        config.seed
    ))
}

/// Runs the trial battery and writes the result tables into `out`.
pub fn run(config: &ExperimentConfig) -> Result<String> {
    let (case, de) = config.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = config.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let summary = pool.install(|| run_trials(&case, &de, config.trials, config.seed))?;
    let ids: Vec<String> = case.well_templates().into_iter().map(|t| t.id).collect();
    let files = export_results(
        &summary,
        &case.name(),
        &config.config.label(),
        &ids,
        &config.out,
    )?;
    let stats = match summary.stats {
        Some(s) => format!(
            "best {} worst {} mean {} median {} USD",
            sig6(s.best),
            sig6(s.worst),
            sig6(s.mean),
            sig6(s.median)
        ),
        None => "no feasible layout found".into(),
    };
    Ok(format!(
        "{} configuration {}: {} trials ({} failed), {stats}; results in {}",
        case.name(),
        config.config.label(),
        summary.trials.len(),
        summary.failed_trials,
        files.finals.parent().unwrap_or(Path::new(".")).display()
    ))
}

/// Recomputes `summary.csv` next to an existing `finals.csv`.
pub fn report(dir: &Path) -> Result<String> {
    let rows = read_finals(&dir.join(FINALS_FILE))?;
    let text = summary_from_finals(&rows)?;
    let path = dir.join(SUMMARY_FILE);
    fs::write(&path, &text).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    Ok(format!("wrote {}", path.display()))
}

/// Synthetic field options of `gen-field`.
#[derive(Debug, Clone)]
pub struct FieldOptions {
    pub grid: Grid,
    pub field: SyntheticField,
    pub out: PathBuf,
}

/// Writes `perm.dat` and `poro.dat` in SPE10 layout (a single layer) and
/// returns a matching `[rock]` table.
pub fn gen_field(o: &FieldOptions) -> Result<String> {
    let rock = generate_synthetic_field(&o.field, o.grid)?;
    let (perm, poro) = to_spe10_text(&rock);
    fs::create_dir_all(&o.out).map_err(|source| Error::Io {
        path: o.out.clone(),
        source,
    })?;
    let perm_path = o.out.join("perm.dat");
    let poro_path = o.out.join("poro.dat");
    for (path, text) in [(&perm_path, perm), (&poro_path, poro)] {
        fs::write(path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(format!(
        "[rock]\nkind = \"spe10\"\nperm = {:?}\nporo = {:?}\ndims = {{ nx = {nx}, ny = {ny}, nz = 1 }}\n\
         window = {{ layer = 1, i_offset = 0, j_offset = 0, width = {nx}, height = {ny} }}\n",
        perm_path.display().to_string(),
        poro_path.display().to_string(),
        nx = o.grid.nx,
        ny = o.grid.ny,
    ))
}
