//! Deterministic quasi-uniform sampling of metric balls and sampled suprema.
//!
//! Interior points come from a Halton sequence in the bounding box of the
//! unit ball, filtered by membership, then carried to `B(a, r)` by `a·δ_r`.
//! Boundary points use the exact parametrization of the unit sphere by the
//! endpoints of unit-length geodesics. Suprema are refined by a compass
//! search around the discrete argmax that stays in the closed ball.

use std::f64::consts::PI;

use crate::cc::{cc_norm, u_minus_sin};
use crate::error::{invalid, Result};
use crate::group::{dilate_unchecked, koranyi_norm, Ball, Metric, Point};

const PRIMES: [u32; 4] = [2, 3, 5, 7];

/// Radical inverse of `index` in `base`.
pub fn halton(mut index: usize, base: u32) -> f64 {
    let b = base as usize;
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % b) as f64;
        index /= b;
    }
    r
}

/// Sample counts for a ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleBudget {
    pub interior: usize,
    pub boundary: usize,
}

impl SampleBudget {
    pub const fn new(interior: usize, boundary: usize) -> Self {
        Self { interior, boundary }
    }

    pub fn total(&self) -> usize {
        self.interior + self.boundary
    }
}

impl Default for SampleBudget {
    fn default() -> Self {
        Self::new(3072, 1024)
    }
}

fn unit_norm(metric: Metric, u: Point) -> Result<f64> {
    match metric {
        Metric::Cc => cc_norm(u),
        Metric::Koranyi => Ok(koranyi_norm(u)),
    }
}

/// Point of the unit CC sphere reached by the geodesic with arc half-angle
/// `theta ∈ [0, π]`, chord direction `chi`, and sign of `t`.
pub fn unit_cc_sphere_point(theta: f64, chi: f64, upper: bool) -> Point {
    let (chord, height) = if theta < 1e-12 {
        (1.0, 0.0)
    } else {
        let chord = theta.sin() / theta;
        let height = u_minus_sin(2.0 * theta) / (2.0 * theta * theta);
        (chord.max(0.0), height)
    };
    let t = if upper { height } else { -height };
    Point::new(chord * chi.cos(), chord * chi.sin(), t)
}

fn unit_sphere_point(metric: Metric, a: f64, b: f64, upper: bool) -> Point {
    match metric {
        Metric::Cc => unit_cc_sphere_point(a * PI, b * 2.0 * PI, upper),
        Metric::Koranyi => {
            // |z|⁴ + t² = 1 with t = sin(φ), φ ∈ [0, π/2].
            let phi = a * 0.5 * PI;
            let t = phi.sin();
            let r = phi.cos().max(0.0).sqrt();
            let chi = b * 2.0 * PI;
            Point::new(r * chi.cos(), r * chi.sin(), if upper { t } else { -t })
        }
    }
}

/// Quasi-uniform points in the unit ball of `metric`, in unit coordinates.
pub fn unit_ball_samples(metric: Metric, budget: SampleBudget) -> Result<Vec<Point>> {
    let probe = Ball {
        center: Point::IDENTITY,
        radius: 1.0,
        metric,
    };
    let ext = probe.unit_extent();
    let mut out = Vec::with_capacity(budget.total());
    let mut i = 1usize;
    while out.len() < budget.interior {
        let u = Point::new(
            (2.0 * halton(i, PRIMES[0]) - 1.0) * ext[0],
            (2.0 * halton(i, PRIMES[1]) - 1.0) * ext[1],
            (2.0 * halton(i, PRIMES[2]) - 1.0) * ext[2],
        );
        i += 1;
        if unit_norm(metric, u)? < 1.0 {
            out.push(u);
        }
    }
    for j in 0..budget.boundary {
        let k = j + 1;
        out.push(unit_sphere_point(
            metric,
            halton(k, PRIMES[0]),
            halton(k, PRIMES[1]),
            j % 2 == 0,
        ));
    }
    Ok(out)
}

/// Quasi-uniform points covering the closed ball.
pub fn ball_samples(ball: &Ball, budget: SampleBudget) -> Result<Vec<Point>> {
    Ok(unit_ball_samples(ball.metric, budget)?
        .into_iter()
        .map(|u| ball.from_unit(u))
        .collect())
}

/// A sampled supremum and where it was attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupEstimate {
    pub value: f64,
    pub argmax: Point,
}

/// Moves a unit-coordinate point back into the closed unit ball by dilation.
fn project_unit(metric: Metric, u: Point) -> Result<Point> {
    let n = unit_norm(metric, u)?;
    if n <= 1.0 {
        Ok(u)
    } else {
        Ok(dilate_unchecked(1.0 / n, u))
    }
}

/// Compass search for a local maximum of `f` over the closed ball, starting
/// from `start` (ambient coordinates).
pub fn refine_max<F>(ball: &Ball, f: &F, start: Point, iterations: usize) -> Result<SupEstimate>
where
    F: Fn(Point) -> Result<f64>,
{
    let to_unit = |p: Point| dilate_unchecked(1.0 / ball.radius, ball.center.inv() * p);
    let mut u = to_unit(start);
    let mut best = f(start)?;
    let ext = ball.unit_extent();
    let scale = [1.0, 1.0, ext[2] / ball.radius / ball.radius];
    let mut h = 0.05;
    for _ in 0..iterations {
        let mut improved = false;
        for axis in 0..3 {
            for sign in [1.0, -1.0] {
                let mut c = u.to_array();
                c[axis] += sign * h * scale[axis];
                let cand = project_unit(ball.metric, Point::from_array(c))?;
                let val = f(ball.from_unit(cand))?;
                if val > best {
                    best = val;
                    u = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
            if h < 1e-7 {
                break;
            }
        }
    }
    Ok(SupEstimate {
        value: best,
        argmax: ball.from_unit(u),
    })
}

/// Supremum of `f` over the ball: quasi-uniform sampling plus local refinement.
pub fn ball_sup<F>(ball: &Ball, f: F, budget: SampleBudget) -> Result<SupEstimate>
where
    F: Fn(Point) -> Result<f64>,
{
    let points = ball_samples(ball, budget)?;
    sup_over(ball, &points, f)
}

/// Supremum of `f` over precomputed samples of `ball`, refined around the argmax.
pub fn sup_over<F>(ball: &Ball, points: &[Point], f: F) -> Result<SupEstimate>
where
    F: Fn(Point) -> Result<f64>,
{
    if points.is_empty() {
        return Err(invalid("points", "no samples"));
    }
    let mut best = SupEstimate {
        value: f64::NEG_INFINITY,
        argmax: points[0],
    };
    for &p in points {
        let v = f(p)?;
        if v > best.value {
            best = SupEstimate { value: v, argmax: p };
        }
    }
    let refined = refine_max(ball, &f, best.argmax, 200)?;
    Ok(if refined.value > best.value { refined } else { best })
}
