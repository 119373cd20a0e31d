//! Normalization: F(0) = 0 and f(1,0) on the positive real axis.

use heisenberg_rigidity::field::{Grid, SampledMap};
use heisenberg_rigidity::fit::normalize;
use heisenberg_rigidity::{Isometry, Point, Result};

fn main() -> Result<()> {
    let grid = Grid::cube(2.0, 5)?;
    let f = SampledMap::dilation(grid, 1.03)?.then_isometry(Isometry::new(false, 0.8, Point::new(0.3, 0.1, -0.2)));
    let n = normalize(&f)?;
    println!("F_N(0)     = {:?}", n.eval(Point::IDENTITY)?);
    println!("F_N(1,0,0) = {:?}", n.eval(Point::new(1.0, 0.0, 0.0))?);
    let nn = normalize(&n)?;
    let p = Point::new(0.3, -0.4, 0.2);
    println!("idempotent at {p:?}: {:?} vs {:?}", n.eval(p)?, nn.eval(p)?);
    Ok(())
}
