//! Oscillation of a matrix field on balls and its exponential integral.

use heisenberg_rigidity::john::JohnDomain;
use heisenberg_rigidity::operator_q::{bso_exp_check, bso_test_balls, largest_c2, BsoInput};
use heisenberg_rigidity::{Point, Result};
use nalgebra::Matrix2;

fn main() -> Result<()> {
    let domain = JohnDomain::cc_ball(Point::IDENTITY, 1.0)?;
    let quad = domain.quadrature(12)?;
    let mats = quad.points.iter().map(|p| Matrix2::new(1.0 + 0.05 * p.x, -0.02 * p.y, 0.02 * p.y, 1.0)).collect();
    let input = BsoInput::new(&quad, mats)?;
    let balls = bso_test_balls(&domain, 32, 2.0)?;
    let sigma = 0.05;
    let r = bso_exp_check(&input, &balls, 2.0, sigma, 1.0, domain.alpha, domain.beta)?;
    println!("balls {}, worst oscillation / σ = {:.4}, pass {}", r.balls_tested, r.worst_ratio, r.pass);
    println!("exponential ratio with c₂ = 1: {:.4}", r.exp_ratio);
    println!("largest c₂ keeping it ≤ 16: {:.4e}", largest_c2(&input, &balls[0], sigma, domain.alpha, domain.beta)?);
    Ok(())
}
