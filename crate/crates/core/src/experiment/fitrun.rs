use std::io::BufReader;
use std::path::Path;

use super::config::ScenarioConfig;
use crate::error::Result;
use crate::field::{read_map, SampledMap};
use crate::fit::{full_fit, FitOptions, FitRecord, FullFitOptions};
use crate::john::JohnDomain;

/// Fits the nearest isometry to `map` over the configured domain.
pub fn run_fit(map: &SampledMap, cfg: &ScenarioConfig) -> Result<FitRecord> {
    cfg.validate()?;
    let domain = JohnDomain::new(cfg.domain)?;
    let opts = FullFitOptions {
        budget: cfg.budget(),
        cells: cfg.grid,
        fit: FitOptions::default(),
    };
    Ok(FitRecord::from(&full_fit(map, &domain, opts)?))
}

/// Reads a tabulated map from `path`.
pub fn load_map(path: &Path) -> Result<SampledMap> {
    read_map(BufReader::new(std::fs::File::open(path)?))
}

/// The map described by `cfg.family`.
pub fn family_map(cfg: &ScenarioConfig) -> Result<SampledMap> {
    cfg.family.build(&JohnDomain::new(cfg.domain)?)
}
