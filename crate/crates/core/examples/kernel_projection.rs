//! Fields annihilated by Q, and projection of a perturbed field onto them.

use heisenberg_rigidity::field::Quadrature;
use heisenberg_rigidity::operator_q::{kernel_field, project_kernel, q_apply, q_magnitude, ComplexField, KernelParams};
use heisenberg_rigidity::{Ball, Result};
use num_complex::Complex64;

fn main() -> Result<()> {
    let params = KernelParams::new(Complex64::new(0.3, -0.1), 0.7, Complex64::new(-0.2, 0.5));
    let u = kernel_field(params);
    let quad = Quadrature::ball(&Ball::unit(), 10)?;
    let worst = q_apply(&u, &quad.points).into_iter().map(q_magnitude).fold(0.0, f64::max);
    println!("sup |Qu| on the kernel field = {worst:.3e}");
    let bump = ComplexField::new(|p| Complex64::new(0.01 * p.x * p.y, 0.0));
    let v = u.sum(&bump, Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    println!("projection of the kernel field: error {:.3e}", project_kernel(&u, &quad)?.max_diff(&params));
    println!("projection after a small bump: shift {:.3e}", project_kernel(&v, &quad)?.max_diff(&params));
    Ok(())
}
