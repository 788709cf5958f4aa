//! Experiment protocol: configurations, cases, trial batteries and export.

mod cases;
mod configs;
mod export;
mod trials;

pub use cases::{
    CaseId, CaseSelection, CaseSpec, ControlPlan, RockSource, CASE3_FLOW_LIMIT, CELL_SIZE,
    FULL_SYNTHETIC_FIELD, MINI_GRID_CELLS, MINI_SYNTHETIC_FIELD,
};
pub use configs::{builtin_config, mini_config, FULL_BUDGET, MINI_BUDGET, MINI_POPULATION_DIVISOR};
pub use export::{
    convergence_csv, convergence_dat, export_results, finals_csv, parse_finals, read_finals,
    summary_csv, summary_from_finals, ExportedFiles, FinalRow, CONVERGENCE_FILE,
    CONVERGENCE_STRIDE, FINALS_FILE, GNUPLOT_FILE, SUMMARY_FILE,
};
pub use trials::{
    run_trial, run_trials, run_trials_on, summarize, Stats, TrialRecord, TrialSummary,
};
