use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// A death-penalty outcome (too-close wells, a flow-limit breach) is never an
/// `Error`; those are ordinary results carrying `Money::NEG_INFINITY`.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: invalid token `{token}`")]
    Parse {
        line: usize,
        column: usize,
        token: String,
    },

    #[error("out of bounds: {0}")]
    Bounds(String),

    #[error("invalid value: {0}")]
    Validation(String),

    #[error(
        "well geometry: wellbore radius {r_w} m is not smaller than equivalent radius {r_e} m"
    )]
    WellGeometry { r_w: f64, r_e: f64 },

    #[error("pressure system is singular: no active pressure-controlled well")]
    SingularSystem,

    #[error("linear solver did not converge (relative residual {residual:e})")]
    SolverNonConvergence { residual: f64 },

    #[error("transport step of {dt} days exceeds the CFL limit of {dt_max} days; sub-step")]
    CflViolation { dt: f64, dt_max: f64 },

    #[error("saturation {value} left [{lower}, {upper}] in cell {cell}")]
    SaturationOvershoot {
        cell: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("configuration: {0}")]
    Config(String),

    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Short category tag used as the prefix of CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Bounds(_) => "bounds",
            Error::Validation(_) => "validation",
            Error::WellGeometry { .. } => "geometry",
            Error::SingularSystem | Error::SolverNonConvergence { .. } => "solver",
            Error::CflViolation { .. } | Error::SaturationOvershoot { .. } => "numerics",
            Error::Config(_) => "config",
            Error::Trial { source, .. } => source.kind(),
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
