//! Command-line front end of the well-placement toolkit.

pub mod commands;
pub mod experiment;
