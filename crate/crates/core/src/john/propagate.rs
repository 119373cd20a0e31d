use rayon::prelude::*;

use super::{build_chain, JohnDomain};
use crate::error::{invalid, Result};
use crate::cc::{cc_dist, geodesic_point};
use crate::field::{qi_report, SampledMap};
use crate::fit::{cancel_vertical, fit_dh_with, FitOptions};
use crate::group::{d_h, koranyi_dist, Ball, Point};
use crate::isometry::Isometry;
use crate::sampling::{ball_samples, SampleBudget};

/// Floor on `σ̂`, so that exact isometries give a finite comparison.
const SIGMA_FLOOR: f64 = 1e-10;
/// Absolute allowance for rounding in the deviation comparisons.
const ABS_FLOOR: f64 = 1e-9;

/// Settings of [`propagate_global`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions {
    pub kappa: f64,
    /// Number of query points whose chains supply the fitted balls.
    pub queries: usize,
    pub ball_budget: SampleBudget,
    pub sup_budget: SampleBudget,
    pub fit: FitOptions,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            kappa: 2.0,
            queries: 12,
            ball_budget: SampleBudget::new(256, 96),
            sup_budget: SampleBudget::new(2048, 512),
            fit: FitOptions::default(),
        }
    }
}

/// Outcome of the local-to-global step and its two bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagation {
    pub iso: Isometry,
    pub sigma_hat: f64,
    pub l_est: f64,
    pub c1: f64,
    pub c1_simple: f64,
    pub balls_fitted: usize,
    pub sup_dh: f64,
    pub sup_rho: f64,
    pub bound_dh: f64,
    pub bound_rho: f64,
}

impl Propagation {
    pub fn holds(&self) -> bool {
        self.sup_dh <= self.bound_dh + ABS_FLOOR
            && self.sup_rho <= self.bound_rho + ABS_FLOOR
            && self.c1 <= self.c1_simple
    }
}

/// `c₁ = 8κ/(2κ-1) · (4Lκβ/α + 2L + 1)`.
pub fn c1_constant(l: f64, kappa: f64, alpha: f64, beta: f64) -> f64 {
    8.0 * kappa / (2.0 * kappa - 1.0) * (4.0 * l * kappa * beta / alpha + 2.0 * l + 1.0)
}

fn fit_ball(f: &SampledMap, ball: &Ball, opts: &PropagationOptions) -> Result<(Isometry, f64)> {
    let pairs = ball_samples(ball, opts.ball_budget)?
        .into_iter()
        .map(|x| Ok((x, f.eval(x)?)))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_dh_with(&pairs, opts.fit)?;
    Ok((fit.iso, fit.lambda_hat / ball.radius))
}

/// Fits every ball of the chains from a set of query points to `x_*`,
/// takes `σ̂` as the largest relative deviation, and builds
/// `Φ_* = π_(0,0,s) ∘ Φ_{B_0}` with `s` cancelling the vertical gap at `x_*`.
pub fn propagate_global(f: &SampledMap, domain: &JohnDomain, opts: PropagationOptions) -> Result<Propagation> {
    if opts.queries == 0 {
        return Err(invalid("queries", "need at least one query point"));
    }
    let kappa = opts.kappa;
    let samples = domain.samples(opts.sup_budget)?;
    let mut queries: Vec<Point> = Vec::with_capacity(opts.queries);
    let stride = (samples.len() / opts.queries).max(1);
    for &p in samples.iter().step_by(stride).take(opts.queries) {
        // Boundary samples are pulled slightly inside.
        let q = if domain.contains(p)? {
            p
        } else {
            geodesic_point(p, domain.x_star, 1e-3 * domain.alpha / cc_dist(p, domain.x_star)?)?
        };
        if domain.contains(q)? {
            queries.push(q);
        }
    }
    let chains = queries
        .par_iter()
        .map(|&x| build_chain(domain, x, kappa).map(|(c, _)| c))
        .collect::<Result<Vec<_>>>()?;
    let b0 = Ball::cc(domain.x_star, domain.boundary_distance(domain.x_star)? / kappa)?;
    let mut balls = vec![b0];
    for c in &chains {
        balls.extend(c.balls.iter().skip(1).copied());
    }
    let fits = balls
        .par_iter()
        .map(|b| fit_ball(f, b, &opts))
        .collect::<Result<Vec<_>>>()?;
    let sigma_hat = fits.iter().map(|&(_, s)| s).fold(SIGMA_FLOOR, f64::max);

    let iso = cancel_vertical(&fits[0].0, domain.x_star, f.eval(domain.x_star)?);
    let l_est = qi_report(f, &samples)?.l_est;
    let c1 = c1_constant(l_est, kappa, domain.alpha, domain.beta);
    let c1_simple = 56.0 * l_est * kappa * domain.beta / domain.alpha;

    let sup_dh = domain
        .sup(|x| Ok(d_h(iso.apply(f.eval(x)?), x)), opts.sup_budget)?
        .value;
    let sup_rho = domain
        .sup(|x| Ok(koranyi_dist(iso.apply(f.eval(x)?), x)), opts.sup_budget)?
        .value;
    let s = c1 * sigma_hat;
    Ok(Propagation {
        iso,
        sigma_hat,
        l_est,
        c1,
        c1_simple,
        balls_fitted: balls.len(),
        sup_dh,
        sup_rho,
        bound_dh: s * domain.beta,
        bound_rho: (s + (2.0 * (l_est + 1.0) * s).sqrt()) * domain.beta,
    })
}
