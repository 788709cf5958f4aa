//! Differential Evolution for the optimal well placement problem.
//!
//! The crate bundles a desk-scale two-phase reservoir simulator
//! ([`flow`]), the NPV objective ([`economics`]), a classical DE optimizer
//! ([`de`]), the well-placement objective with death-penalty constraints
//! ([`placement`]), and the trial harness that runs whole experiments
//! ([`harness`]).

pub mod de;
pub mod economics;
pub mod error;
pub mod flow;
pub mod format;
pub mod grid;
pub mod harness;
pub mod placement;
pub mod units;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/grid.md")]
    mod grid {}
    #[doc = include_str!("../../../book/src/simulator.md")]
    mod simulator {}
    #[doc = include_str!("../../../book/src/objective.md")]
    mod objective {}
    #[doc = include_str!("../../../book/src/optimizer.md")]
    mod optimizer {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
