use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wellplace::grid::{Grid, SyntheticField, SPE10_LAYER_THICKNESS};
use wellplace::{Error, Result};
use wellplace_cli::commands::{self, FieldOptions, Overrides};

/// Differential Evolution well placement experiments.
#[derive(Parser)]
#[command(name = "wellplace", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a trial battery and write finals.csv, convergence.csv,
    /// summary.csv and convergence.dat.
    Run(ExperimentArgs),
    /// Recompute summary.csv from the finals.csv in an output directory.
    Report {
        /// Output directory of a previous run.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Take the output directory from this experiment file.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Write a synthetic rock field in SPE10 text layout.
    GenField(FieldArgs),
    /// Check an experiment and its data files without running it.
    Validate(ExperimentArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Case: 1..3 or case1..case3, optionally with -mini.
    #[arg(long)]
    case: Option<String>,
    /// DE configuration 1..8.
    #[arg(long = "de-config")]
    de_config: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Base seed; trial t uses seed + t.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Use the desk-scale variant of the case.
    #[arg(long)]
    mini: bool,
}

impl ExperimentArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            case: self.case.clone(),
            de_config: self.de_config,
            trials: self.trials,
            seed: self.seed,
            out: self.out.clone(),
            jobs: self.jobs,
            mini: self.mini,
        }
    }
}

#[derive(Args)]
struct FieldArgs {
    /// Directory for perm.dat and poro.dat.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 60)]
    nx: usize,
    #[arg(long, default_value_t = 50)]
    ny: usize,
    /// Cell edge, m.
    #[arg(long, default_value_t = 32.0)]
    cell: f64,
    /// Cell thickness, m.
    #[arg(long, default_value_t = SPE10_LAYER_THICKNESS)]
    dz: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Mean of ln(k / mD).
    #[arg(long = "log-mean", default_value_t = 4.0, allow_hyphen_values = true)]
    log_mean: f64,
    /// Standard deviation of ln(k / mD).
    #[arg(long = "log-sigma", default_value_t = 1.5)]
    log_sigma: f64,
    /// Smoothing half-width in cells.
    #[arg(long, default_value_t = 3)]
    radius: usize,
}

fn execute(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Run(a) => commands::run(&commands::resolve(a.config.as_deref(), &a.overrides())?),
        Command::Validate(a) => {
            commands::validate(&commands::resolve(a.config.as_deref(), &a.overrides())?)
        }
        Command::Report { out, config } => {
            let dir = match (out, config) {
                (Some(dir), _) => dir,
                (None, Some(path)) => wellplace_cli::experiment::ExperimentConfig::load(&path)?.out,
                (None, None) => return Err(Error::Config("report needs --out or --config".into())),
            };
            commands::report(&dir)
        }
        Command::GenField(a) => commands::gen_field(&FieldOptions {
            grid: Grid::new(a.nx, a.ny, a.cell, a.cell, a.dz)?,
            field: SyntheticField {
                seed: a.seed,
                log_mean: a.log_mean,
                log_sigma: a.log_sigma,
                smoothing_radius: a.radius,
            },
            out: a.out,
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error[usage]: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(message) => {
            println!("{message}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let mut message = e.to_string();
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                if !message.contains(&s.to_string()) {
                    message = format!("{message}: {s}");
                }
                source = s.source();
            }
            eprintln!("error[{}]: {}", e.kind(), message.replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
