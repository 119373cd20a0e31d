//! Sharpness sweep over δ_{1+ε} with log-log slopes.

use heisenberg_rigidity::experiment::{run_sharpness, ScenarioConfig};
use heisenberg_rigidity::Result;

fn main() -> Result<()> {
    let mut cfg = ScenarioConfig::default();
    cfg.sharpness.epsilons = vec![1e-3, 1e-2, 1e-1];
    cfg.samples.interior = 1024;
    cfg.samples.boundary = 256;
    let r = run_sharpness(&cfg)?;
    print!("{}", r.to_csv());
    print!("{}", r.slopes_csv());
    Ok(())
}
