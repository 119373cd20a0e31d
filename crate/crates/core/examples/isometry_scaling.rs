//! Deviation of a near-identity isometry on a ball and on its enlargement.

use heisenberg_rigidity::isometry::deviation_scaling_check;
use heisenberg_rigidity::sampling::SampleBudget;
use heisenberg_rigidity::{Isometry, Point, Result};

fn main() -> Result<()> {
    let phi = Isometry::new(false, 0.01, Point::new(0.005, -0.003, 0.02));
    let a = Point::new(0.2, 0.1, -0.3);
    let (r, s) = (0.5, 3.0);
    let d = deviation_scaling_check(&phi, a, r, s, SampleBudget::default())?;
    let eps = d.epsilon(r);
    println!("ε = sup_B d(Φ, id)/r       = {eps:.6e}");
    println!("sup over sB                = {:.6e} ≤ (2s+1)rε = {:.6e}", d.sup_outer, (2.0 * s + 1.0) * r * eps);
    println!("|D_hΦ - I|                 = {:.6e} ≤ 2ε = {:.6e}", d.dh_matrix_dev, 2.0 * eps);
    println!("holds with slack 1.05: {}", d.holds(r, s, 1.05));
    Ok(())
}
