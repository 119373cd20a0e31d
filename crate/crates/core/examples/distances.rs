//! Group law, the three distances, and a point on a CC geodesic.

use heisenberg_rigidity::cc::{cc_dist, geodesic_point};
use heisenberg_rigidity::group::{d_h, dilate, koranyi_dist};
use heisenberg_rigidity::{Point, Result};

fn main() -> Result<()> {
    let p = Point::new(0.3, -0.2, 0.5);
    let q = Point::new(-0.1, 0.4, -0.25);
    println!("p·q = {:?}", p * q);
    println!("p⁻¹ = {:?}", p.inv());
    println!("d_cc(p, q)      = {:.12}", cc_dist(p, q)?);
    println!("ρ(p, q)         = {:.12}", koranyi_dist(p, q));
    println!("d^H(p, q)       = {:.12}", d_h(p, q));
    let v = Point::new(0.0, 0.0, 4.0);
    println!("d_cc((0,0,4), 0) = {:.12} (√(4π) = {:.12})", cc_dist(v, Point::IDENTITY)?, (4.0 * std::f64::consts::PI).sqrt());
    let r = 2.5;
    println!(
        "homogeneity: d(δ_r p, δ_r q) / (r d(p, q)) = {:.15}",
        cc_dist(dilate(r, p)?, dilate(r, q)?)? / (r * cc_dist(p, q)?)
    );
    let m = geodesic_point(p, q, 0.5)?;
    println!("geodesic midpoint {m:?}: d(p, m) = {:.12}, d(m, q) = {:.12}", cc_dist(p, m)?, cc_dist(m, q)?);
    Ok(())
}
