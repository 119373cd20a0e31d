//! Pointwise inequality for |Qu| with u = (f₁ - x) + i(f₂ - y).

use heisenberg_rigidity::field::{Grid, SampledMap};
use heisenberg_rigidity::operator_q::main_inequality_residual;
use heisenberg_rigidity::{Error, Isometry, Result};

fn main() -> Result<()> {
    let grid = Grid::cube(2.0, 3)?;
    let pts = Grid::cube(1.0, 7)?.nodes();
    for eps in [0.01, 0.1, 0.19] {
        let m = main_inequality_residual(&SampledMap::dilation(grid, 1.0 + eps)?, &pts)?;
        println!("δ_{{1+{eps}}}: ε̂ = {:.4}, worst scaled residual = {:.4e}", m.eps_hat, m.worst_scaled());
    }
    match main_inequality_residual(&SampledMap::isometry(grid, Isometry::reflection()), &pts) {
        Err(Error::Refused(why)) => println!("reflection refused: {why}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
