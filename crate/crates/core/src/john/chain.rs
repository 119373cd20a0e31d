use std::io::Write;

use super::JohnDomain;
use crate::cc::{cc_dist, geodesic_point};
use crate::error::{invalid, Error, Result};
use crate::group::{Ball, Point};

/// Fraction of the current radius advanced along the John curve per ball.
const STEP: f64 = 0.6;
const MAX_BALLS: usize = 10_000;
/// Relative slack on the clause inequalities, for rounding only.
const SLACK: f64 = 1e-9;

/// Balls `B_0 … B_k` from `x_*` to `x`, linked by `D_0 … D_{k-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallChain {
    pub balls: Vec<Ball>,
    pub links: Vec<Ball>,
    pub kappa: f64,
}

impl BallChain {
    /// Index of the last ball.
    pub fn k(&self) -> usize {
        self.balls.len() - 1
    }
}

/// Margins of the three clauses; each is nonnegative when the clause holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainReport {
    pub k: usize,
    pub enlargement_margin: f64,
    pub reach_margin: f64,
    pub ratio_margin: f64,
    pub sum_margin: f64,
    pub containment_margin: f64,
}

/// Walks the John curve from `x_*` to `x`, placing balls of radius
/// `dist(·, ∂U)/κ` and advancing `0.6` radii per step, then verifies the
/// chain.
pub fn build_chain(domain: &JohnDomain, x: Point, kappa: f64) -> Result<(BallChain, ChainReport)> {
    if !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(invalid("kappa", format!("{kappa} is below 1")));
    }
    if !domain.contains(x)? {
        return Err(invalid("x", format!("{x:?} is not in the domain")));
    }
    let x_star = domain.x_star;
    let path = domain.john_path(x)?;
    let total = path.length();
    let radius_at = |p: Point| -> Result<f64> { Ok(domain.boundary_distance(p)? / kappa) };

    let mut centers = vec![x_star];
    let mut s = 0.0;
    loop {
        let r = radius_at(*centers.last().expect("nonempty"))?;
        if total - s <= STEP * r {
            if total > 0.0 {
                centers.push(x);
            }
            break;
        }
        if centers.len() >= MAX_BALLS {
            return Err(Error::ChainClause {
                clause: 1,
                index: centers.len(),
                detail: "radii collapse before reaching x".into(),
            });
        }
        s += STEP * r;
        centers.push(path.point_at(total - s)?);
    }

    let mut balls = Vec::with_capacity(centers.len());
    for &c in &centers {
        balls.push(Ball::cc(c, radius_at(c)?)?);
    }
    let mut links = Vec::with_capacity(balls.len().saturating_sub(1));
    for w in balls.windows(2) {
        let (a, b) = (w[0], w[1]);
        let frac = a.radius / (a.radius + b.radius);
        let y = geodesic_point(a.center, b.center, frac)?;
        links.push(Ball::cc(y, 0.5 * a.radius.min(b.radius))?);
    }
    let chain = BallChain { balls, links, kappa };
    let report = verify_chain(domain, x, &chain)?;
    Ok((chain, report))
}

fn clause(clause: u8, index: usize, detail: String) -> Error {
    Error::ChainClause { clause, index, detail }
}

/// Checks the three chain clauses, naming the first violated clause and
/// ball index.
pub fn verify_chain(domain: &JohnDomain, x: Point, chain: &BallChain) -> Result<ChainReport> {
    let (alpha, beta, kappa) = (domain.alpha, domain.beta, chain.kappa);
    let balls = &chain.balls;
    let k = balls.len() - 1;
    if chain.links.len() != k {
        return Err(invalid("chain", "need one link per consecutive pair"));
    }
    let last = balls[k];
    if (last.center.inv() * x).to_array().iter().any(|c| c.abs() > 1e-12) {
        return Err(clause(1, k, "last ball is not centered at x".into()));
    }
    let tol = |v: f64| SLACK * v.abs().max(1e-300);

    let mut report = ChainReport {
        k,
        enlargement_margin: f64::INFINITY,
        reach_margin: f64::INFINITY,
        ratio_margin: f64::INFINITY,
        sum_margin: 0.0,
        containment_margin: f64::INFINITY,
    };
    for (i, b) in balls.iter().enumerate() {
        let room = domain.boundary_distance(b.center)? - kappa * b.radius;
        if room < -tol(kappa * b.radius) {
            return Err(clause(1, i, format!("κ-enlargement leaves the domain by {}", -room)));
        }
        report.enlargement_margin = report.enlargement_margin.min(room);
        let reach = kappa * beta / alpha * b.radius - cc_dist(x, b.center)?;
        if reach < -tol(b.radius) {
            return Err(clause(1, i, format!("d(x, x_i) exceeds κβ/α·r_i by {}", -reach)));
        }
        report.reach_margin = report.reach_margin.min(reach);
    }

    let lo = (2.0 * kappa - 1.0) / (2.0 * kappa + 1.0);
    for i in 0..k {
        let q = balls[i].radius / balls[i + 1].radius;
        let m = (q - lo).min(1.0 / lo - q);
        if m < -SLACK {
            return Err(clause(2, i, format!("radius ratio {q} outside [{lo}, {}]", 1.0 / lo)));
        }
        report.ratio_margin = report.ratio_margin.min(m);
    }
    let sum: f64 = balls.iter().take(k.saturating_sub(1)).map(|b| b.radius).sum::<f64>()
        + if k >= 1 { last.radius } else { 0.0 };
    report.sum_margin = 2.0 * beta - sum;
    if report.sum_margin < -tol(beta) {
        return Err(clause(2, k, format!("radius sum {sum} exceeds 2β = {}", 2.0 * beta)));
    }

    let m = 3.0 + 2.0 * (kappa + 1.0) * beta / alpha;
    for (i, d) in chain.links.iter().enumerate() {
        let want = 0.5 * balls[i].radius.min(balls[i + 1].radius);
        if (d.radius - want).abs() > tol(want) {
            return Err(clause(3, i, format!("link radius {} is not {want}", d.radius)));
        }
        // B_k ⊂ M·D_i when every point of B_k is within M ρ_i of y_i.
        let room = m * d.radius - cc_dist(d.center, last.center)? - last.radius;
        if room < -tol(m * d.radius) {
            return Err(clause(3, i, format!("B_k sticks out of the enlarged link by {}", -room)));
        }
        report.containment_margin = report.containment_margin.min(room);
    }
    Ok(report)
}

/// Writes one line `i cx cy ct r` per ball.
pub fn write_chain<W: Write>(chain: &BallChain, mut out: W) -> Result<()> {
    for (i, b) in chain.balls.iter().enumerate() {
        writeln!(
            out,
            "{i} {:.16e} {:.16e} {:.16e} {:.16e}",
            b.center.x, b.center.y, b.center.t, b.radius
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_chain_at_the_center() {
        let d = JohnDomain::cc_ball(Point::IDENTITY, 1.0).unwrap();
        let (c, _) = build_chain(&d, Point::IDENTITY, 2.0).unwrap();
        assert_eq!(c.balls.len(), 1);
        assert!(c.links.is_empty());
    }

    #[test]
    fn near_boundary_ball_point() {
        let d = JohnDomain::cc_ball(Point::IDENTITY, 1.0).unwrap();
        let x = crate::sampling::unit_cc_sphere_point(0.7, 0.4, true);
        let x = crate::group::dilate(0.99, x).unwrap();
        let (c, r) = build_chain(&d, x, 2.0).unwrap();
        assert!(c.k() > 3);
        assert!(r.sum_margin >= 0.0 && r.containment_margin >= 0.0);
    }

    #[test]
    fn broken_chains_name_the_clause() {
        let d = JohnDomain::cc_ball(Point::IDENTITY, 1.0).unwrap();
        let x = Point::new(0.9, 0.0, 0.0);
        let (mut c, _) = build_chain(&d, x, 2.0).unwrap();
        c.balls[1].radius *= 3.0;
        assert!(matches!(
            verify_chain(&d, x, &c),
            Err(Error::ChainClause { clause: 1, index: 1, .. })
        ));
        let (mut c, _) = build_chain(&d, x, 2.0).unwrap();
        c.links[0].radius *= 0.5;
        assert!(matches!(
            verify_chain(&d, x, &c),
            Err(Error::ChainClause { clause: 3, index: 0, .. })
        ));
    }

    #[test]
    fn export_has_one_line_per_ball() {
        let d = JohnDomain::cc_ball(Point::IDENTITY, 1.0).unwrap();
        let (c, _) = build_chain(&d, Point::new(0.5, 0.5, 0.1), 2.0).unwrap();
        let mut buf = Vec::new();
        write_chain(&c, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), c.balls.len());
        assert!(text.starts_with("0 0.0000000000000000e0 "));
    }
}
