//! A chain of balls in a box from the centre to a point near a corner.

use heisenberg_rigidity::john::{build_chain, write_chain, JohnDomain};
use heisenberg_rigidity::{Point, Result};

fn main() -> Result<()> {
    let domain = JohnDomain::coordinate_box([-1.0; 3], [1.0; 3])?;
    println!("α = {:.6}, β = {:.6}", domain.alpha, domain.beta);
    for j in 1..=5 {
        let c = 1.0 - 10f64.powi(-j);
        let (_, rep) = build_chain(&domain, Point::new(c, c, c), 2.0)?;
        println!(
            "corner distance 1e-{j}: k = {}, reach margin {:.3e}, ratio margin {:.3e}, containment margin {:.3e}",
            rep.k, rep.reach_margin, rep.ratio_margin, rep.containment_margin
        );
    }
    let (chain, _) = build_chain(&domain, Point::new(0.9, 0.9, 0.9), 2.0)?;
    write_chain(&chain, std::io::stdout().lock())?;
    Ok(())
}
