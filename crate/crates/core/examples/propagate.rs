//! Local fits on a chain of balls combined into one global isometry.

use heisenberg_rigidity::field::SampledMap;
use heisenberg_rigidity::john::{propagate_global, JohnDomain, PropagationOptions};
use heisenberg_rigidity::{Point, Result};

fn main() -> Result<()> {
    let domain = JohnDomain::cc_ball(Point::IDENTITY, 1.0)?;
    let f = SampledMap::dilation(domain.grid(3, 0.5)?, 1.02)?;
    let p = propagate_global(&f, &domain, PropagationOptions::default())?;
    println!("balls fitted {}, σ̂ = {:.4e}, L = {:.5}, c₁ = {:.3}", p.balls_fitted, p.sigma_hat, p.l_est, p.c1);
    println!("sup d^H = {:.4e} ≤ {:.4e}", p.sup_dh, p.bound_dh);
    println!("sup ρ   = {:.4e} ≤ {:.4e}", p.sup_rho, p.bound_rho);
    println!("holds: {}", p.holds());
    Ok(())
}
