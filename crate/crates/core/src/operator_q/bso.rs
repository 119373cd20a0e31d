use nalgebra::Matrix2;

use crate::error::{invalid, Result};
use crate::field::Quadrature;
use crate::group::{Ball, Point};
use crate::isometry::op_norm;
use crate::john::JohnDomain;
use crate::sampling::SampleBudget;

/// A matrix field sampled on quadrature cells of a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct BsoInput {
    pub points: Vec<Point>,
    pub mats: Vec<Matrix2<f64>>,
    pub cell_volume: f64,
}

impl BsoInput {
    pub fn new(quad: &Quadrature, mats: Vec<Matrix2<f64>>) -> Result<Self> {
        if mats.len() != quad.len() {
            return Err(invalid("mats", "need one matrix per quadrature cell"));
        }
        Ok(Self {
            points: quad.points.clone(),
            mats,
            cell_volume: quad.cell_volume,
        })
    }

    fn indices_in(&self, ball: &Ball) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for (i, &p) in self.points.iter().enumerate() {
            if ball.contains(p)? {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Orthogonal matrix nearest in Frobenius norm to the mean over `idx`.
    fn procrustes(&self, idx: &[usize]) -> Matrix2<f64> {
        let m = idx.iter().map(|&i| self.mats[i]).sum::<Matrix2<f64>>() / idx.len() as f64;
        let (rc, rs) = (m[(0, 0)] + m[(1, 1)], m[(1, 0)] - m[(0, 1)]);
        let (fc, fs) = (m[(0, 0)] - m[(1, 1)], m[(0, 1)] + m[(1, 0)]);
        if rc.hypot(rs) >= fc.hypot(fs) {
            let a = rs.atan2(rc);
            Matrix2::new(a.cos(), -a.sin(), a.sin(), a.cos())
        } else {
            let a = fs.atan2(fc);
            Matrix2::new(a.cos(), a.sin(), a.sin(), -a.cos())
        }
    }
}

/// Outcome of the oscillation and integrability checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsoReport {
    pub pass: bool,
    /// Largest `(⨍_B |f - φ_B|^q)^{1/q} / σ` over tested balls.
    pub worst_ratio: f64,
    pub balls_tested: usize,
    /// `⨍_U exp((β/α)⁵ c₂ |f - φ_{B₀}| / σ)`.
    pub exp_ratio: f64,
}

/// Balls centred at interior samples with radius `dist(·, ∂U)/κ`, led by
/// the ball at `x_*`.
pub fn bso_test_balls(domain: &JohnDomain, count: usize, kappa: f64) -> Result<Vec<Ball>> {
    let mut balls = vec![Ball::cc(domain.x_star, domain.boundary_distance(domain.x_star)? / kappa)?];
    for p in domain.samples(SampleBudget::new(count, 0))? {
        let d = domain.boundary_distance(p)?;
        if d > 0.0 {
            balls.push(Ball::cc(p, d / kappa)?);
        }
    }
    Ok(balls)
}

fn exp_ratio(input: &BsoInput, phi0: &Matrix2<f64>, scale: f64) -> f64 {
    let n = input.mats.len() as f64;
    input.mats.iter().map(|m| (scale * op_norm(&(m - phi0))).exp()).sum::<f64>() / n
}

/// Tests `∫_B |f - φ_B|^q ≤ σ^q |B|` on every ball with cells, `φ_B` the
/// Procrustes fit on `B`, and evaluates the exponential ratio against the
/// fit on `balls[0]`.
pub fn bso_exp_check(
    input: &BsoInput,
    balls: &[Ball],
    q: f64,
    sigma: f64,
    c2: f64,
    alpha: f64,
    beta: f64,
) -> Result<BsoReport> {
    if !(q >= 1.0) || !(sigma > 0.0) || !(c2 >= 0.0) {
        return Err(invalid("bso", "need q ≥ 1, σ > 0, c₂ ≥ 0"));
    }
    if balls.is_empty() {
        return Err(invalid("balls", "no test balls"));
    }
    let mut worst: f64 = 0.0;
    let mut tested = 0;
    let mut phi0 = None;
    for (j, b) in balls.iter().enumerate() {
        let idx = input.indices_in(b)?;
        if idx.is_empty() {
            continue;
        }
        let phi = input.procrustes(&idx);
        if j == 0 {
            phi0 = Some(phi);
        }
        let mean = idx.iter().map(|&i| op_norm(&(input.mats[i] - phi)).powf(q)).sum::<f64>() / idx.len() as f64;
        worst = worst.max(mean.powf(1.0 / q) / sigma);
        tested += 1;
    }
    let phi0 = phi0.ok_or_else(|| invalid("balls", "the leading ball holds no cells"))?;
    let scale = (beta / alpha).powi(5) * c2 / sigma;
    Ok(BsoReport {
        pass: worst <= 1.0 + 1e-12,
        worst_ratio: worst,
        balls_tested: tested,
        exp_ratio: exp_ratio(input, &phi0, scale),
    })
}

/// Largest `c₂` with exponential ratio at most 16, by bisection; capped at
/// `1e12` when the field matches `φ_{B₀}` everywhere.
pub fn largest_c2(input: &BsoInput, b0: &Ball, sigma: f64, alpha: f64, beta: f64) -> Result<f64> {
    let idx = input.indices_in(b0)?;
    if idx.is_empty() {
        return Err(invalid("b0", "ball holds no cells"));
    }
    let phi0 = input.procrustes(&idx);
    let unit = (beta / alpha).powi(5) / sigma;
    let ratio = |c2: f64| exp_ratio(input, &phi0, unit * c2);
    const CAP: f64 = 1e12;
    if ratio(CAP) <= 16.0 {
        return Ok(CAP);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while ratio(hi) <= 16.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) <= 16.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(lo)
}
