//! Configured experiments: sharpness sweeps, inequality suites and fits.

mod config;
mod fitrun;
mod sharpness;
mod suites;

pub use config::{
    MapFamily, OutputConfig, PotentialId, Samples, ScenarioConfig, SharpnessConfig, SuiteConfig,
};
pub use fitrun::{family_map, load_map, run_fit};
pub use sharpness::{ols_slope, run_sharpness, SharpnessReport, SharpnessRow, SLOPE_WINDOWS};
pub use suites::{run_suite, Check, Status, SuiteName, SuiteReport};
