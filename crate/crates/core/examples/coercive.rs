//! Empirical constant of the coercive estimate over random polynomial fields.

use heisenberg_rigidity::field::Quadrature;
use heisenberg_rigidity::operator_q::coercive_study;
use heisenberg_rigidity::{Ball, Result};

fn main() -> Result<()> {
    let quad = Quadrature::ball(&Ball::unit(), 12)?;
    for n in [50, 100] {
        let s = coercive_study(7, n, 2.0, &quad)?;
        println!("{n} fields: Ĉ(2) = {:.6}, all bounded: {}", s.c_hat, s.all_bounded());
    }
    Ok(())
}
