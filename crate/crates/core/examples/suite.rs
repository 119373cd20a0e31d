//! One inequality suite from a configuration document.

use heisenberg_rigidity::experiment::{run_suite, ScenarioConfig, Status, SuiteName};
use heisenberg_rigidity::Result;

fn main() -> Result<()> {
    let cfg = ScenarioConfig::from_toml("seed = 3\n[suite]\ninstances = 20\n")?;
    let r = run_suite(SuiteName::Lemma2, &cfg)?;
    println!("{}: {} pass, {} fail, {} refused", r.suite, r.count(Status::Pass), r.count(Status::Fail), r.count(Status::Refused));
    let tightest = r.checks.iter().min_by(|a, b| a.margin().total_cmp(&b.margin())).expect("checks");
    println!("tightest: {} margin {:.3e}", tightest.case, tightest.margin());
    Ok(())
}
