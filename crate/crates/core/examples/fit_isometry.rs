//! Minimax fit of an isometry, exact on isometries and of size ε on δ_{1+ε}.

use heisenberg_rigidity::field::SampledMap;
use heisenberg_rigidity::fit::{fit_dh, full_fit, FullFitOptions};
use heisenberg_rigidity::john::JohnDomain;
use heisenberg_rigidity::sampling::{ball_samples, SampleBudget};
use heisenberg_rigidity::{Ball, Isometry, Point, Result};

fn main() -> Result<()> {
    let iso = Isometry::new(true, 1.2, Point::new(0.4, -0.7, 1.5));
    let pairs: Vec<(Point, Point)> = ball_samples(&Ball::unit(), SampleBudget::new(512, 128))?
        .into_iter()
        .map(|x| (x, iso.apply(x)))
        .collect();
    let fit = fit_dh(&pairs)?;
    println!("exact isometry: branch {}, λ̂ = {:.3e}", fit.branch.as_str(), fit.lambda_hat);
    println!("recovered inverse up to vertical translation: {:?}", fit.iso);

    let domain = JohnDomain::cc_ball(Point::IDENTITY, 1.0)?;
    let f = SampledMap::dilation(domain.grid(3, 0.5)?, 1.05)?;
    let r = full_fit(&f, &domain, FullFitOptions::default())?;
    println!("δ_1.05: sup d = {:.4e}, sup d^H = {:.4e}, Sobolev deviation = {:.4e}", r.sup_d, r.sup_dh, r.sobolev_dev);
    Ok(())
}
