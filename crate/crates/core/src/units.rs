//! Unit conversion constants.
//!
//! Inputs and outputs use field-friendly units (bar, mD, cp, days, m³/day).
//! The simulator works internally in SI; every conversion goes through here.

/// Pascal per bar.
pub const BAR: f64 = 1.0e5;
/// Square meters per millidarcy.
pub const MILLIDARCY: f64 = 9.869_233e-16;
/// Pascal-seconds per centipoise.
pub const CENTIPOISE: f64 = 1.0e-3;
/// Seconds per day.
pub const DAY: f64 = 86_400.0;
/// Days per year, used for schedules and discounting.
pub const DAYS_PER_YEAR: f64 = 365.0;
/// Barrels per cubic meter.
pub const BARRELS_PER_M3: f64 = 6.2898;
/// Meters per foot.
pub const FOOT: f64 = 0.3048;
