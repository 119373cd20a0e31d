//! John domains: CC balls and coordinate boxes, their inner and outer radii,
//! chains of balls, and propagation of local fits to a global one.
//!
//! John curves are CC geodesics in balls and polylines of geodesic pieces
//! in boxes.

mod chain;
mod path;
mod propagate;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::cc::{cc_dist, cc_norm};
use crate::error::{invalid, Error, Result};
use crate::field::{Grid, Quadrature};
use crate::group::{Ball, Point};
use crate::sampling::{ball_samples, halton, sup_over, SampleBudget, SupEstimate};

pub use path::{ascent_path, JohnPath};
pub use chain::{build_chain, verify_chain, write_chain, BallChain, ChainReport};
pub use propagate::{c1_constant, propagate_global, Propagation, PropagationOptions};

/// Geometry of a supported domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    CcBall { center: [f64; 3], radius: f64 },
    Box { lo: [f64; 3], hi: [f64; 3] },
}

impl DomainSpec {
    pub fn unit_ball() -> Self {
        DomainSpec::CcBall {
            center: [0.0; 3],
            radius: 1.0,
        }
    }
}

/// A John domain with its distinguished point and radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JohnDomain {
    pub spec: DomainSpec,
    pub x_star: Point,
    /// Inner radius.
    pub alpha: f64,
    /// Outer radius.
    pub beta: f64,
}

const SIDE_FLOOR: f64 = 1e-6;
/// Factor applied to the sampled cone slope of a box.
const ALPHA_MARGIN: f64 = 0.9;

fn validate(spec: &DomainSpec) -> Result<()> {
    match *spec {
        DomainSpec::CcBall { center, radius } => {
            if !center.iter().all(|c| c.is_finite()) {
                return Err(invalid("center", "non-finite"));
            }
            Ball::cc(Point::from_array(center), radius)?;
        }
        DomainSpec::Box { lo, hi } => {
            for a in 0..3 {
                let side = hi[a] - lo[a];
                if !(side.is_finite() && side > SIDE_FLOOR) {
                    return Err(invalid("box", format!("side {a} has length {side}")));
                }
            }
        }
    }
    Ok(())
}

fn distinguished_point(spec: &DomainSpec) -> Point {
    match *spec {
        DomainSpec::CcBall { center, .. } => Point::from_array(center),
        DomainSpec::Box { lo, hi } => Point::from_array(std::array::from_fn(|a| 0.5 * (lo[a] + hi[a]))),
    }
}

/// CC distance from `p` to the half-space `{t ≥ p.t + delta}`, `delta ≥ 0`.
/// With `w = p⁻¹·q`, the height gained is `w.t + 2 Im(p̄ w_z)`, at most
/// `w.t + 2|p_z||w_z|`, so one minimizes over `m = |w_z|`. Since the norm
/// is at least `m` and `m = 0` costs `√(πδ)`, the search stops there.
fn vertical_gap(delta: f64, rho: f64) -> Result<f64> {
    if delta <= 0.0 {
        return Ok(0.0);
    }
    let vertical = (PI * delta).sqrt();
    let top = if rho > 0.0 { (delta / (2.0 * rho)).min(vertical) } else { vertical };
    let f = |m: f64| cc_norm(Point::new(m, 0.0, (delta - 2.0 * rho * m).max(0.0)));
    let n = 24;
    let mut best = (f64::INFINITY, 0usize);
    for i in 0..=n {
        let v = f(top * i as f64 / n as f64)?;
        if v < best.0 {
            best = (v, i);
        }
    }
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = top * best.1.saturating_sub(1) as f64 / n as f64;
    let mut b = top * (best.1 + 1).min(n) as f64 / n as f64;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > 1e-6 * top {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(best.0.min(fc).min(fd))
}

/// `dist(p, ∂U)` for `p` in the box, `0` outside.
fn box_distance(lo: [f64; 3], hi: [f64; 3], p: Point) -> Result<f64> {
    let c = p.to_array();
    if (0..3).any(|a| c[a] <= lo[a] || c[a] >= hi[a]) {
        return Ok(0.0);
    }
    let rho = p.x.hypot(p.y);
    let mut best = (c[0] - lo[0])
        .min(hi[0] - c[0])
        .min(c[1] - lo[1])
        .min(hi[1] - c[1]);
    for delta in [hi[2] - c[2], c[2] - lo[2]] {
        if gap_lower_bound(delta, rho) < best {
            best = best.min(vertical_gap(delta, rho)?);
        }
    }
    Ok(best)
}

/// Within CC radius `n` the height gain is at most `(2/π) n² + 2ρ n`.
fn gap_lower_bound(delta: f64, rho: f64) -> f64 {
    let a = 2.0 / PI;
    delta / (rho + (rho * rho + a * delta).sqrt())
}

fn face_points(lo: [f64; 3], hi: [f64; 3], m: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(6 * m * m);
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        for side in [lo[axis], hi[axis]] {
            for i in 0..m {
                for j in 0..m {
                    let mut c = [0.0; 3];
                    c[axis] = side;
                    c[u] = lo[u] + (hi[u] - lo[u]) * i as f64 / (m - 1) as f64;
                    c[v] = lo[v] + (hi[v] - lo[v]) * j as f64 / (m - 1) as f64;
                    out.push(Point::from_array(c));
                }
            }
        }
    }
    out
}

fn clamp_to_box(lo: [f64; 3], hi: [f64; 3], p: Point) -> Point {
    let c = p.to_array();
    Point::from_array(std::array::from_fn(|a| c[a].clamp(lo[a], hi[a])))
}

/// Compass search for a local maximum of `f` over a box.
fn refine_in_box<F>(lo: [f64; 3], hi: [f64; 3], f: &F, start: SupEstimate) -> Result<SupEstimate>
where
    F: Fn(Point) -> Result<f64>,
{
    let side: [f64; 3] = std::array::from_fn(|a| hi[a] - lo[a]);
    let mut best = start;
    let mut h = 0.05;
    for _ in 0..200 {
        let mut improved = false;
        for axis in 0..3 {
            for sign in [1.0, -1.0] {
                let mut c = best.argmax.to_array();
                c[axis] += sign * h * side[axis];
                let cand = clamp_to_box(lo, hi, Point::from_array(c));
                let v = f(cand)?;
                if v > best.value {
                    best = SupEstimate { value: v, argmax: cand };
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
    Ok(best)
}

/// Inner and outer radii at the default sampling resolution, memoized per
/// domain.
pub fn john_params(spec: &DomainSpec) -> Result<(f64, f64)> {
    static MEMO: OnceLock<Mutex<HashMap<[u64; 6], (f64, f64)>>> = OnceLock::new();
    let key = match *spec {
        DomainSpec::CcBall { radius, .. } => return john_params_with(spec, 7).map(|_| (radius, radius)),
        DomainSpec::Box { lo, hi } => {
            let mut k = [0u64; 6];
            for a in 0..3 {
                k[a] = lo[a].to_bits();
                k[a + 3] = hi[a].to_bits();
            }
            k
        }
    };
    let memo = MEMO.get_or_init(Default::default);
    if let Some(&v) = memo.lock().expect("memo lock").get(&key) {
        return Ok(v);
    }
    let v = john_params_with(spec, 7)?;
    memo.lock().expect("memo lock").insert(key, v);
    Ok(v)
}

/// Inner and outer radii in the twisted-cone sense: every John curve has
/// length at most `β` and satisfies `d_U(γ(s)) ≥ (α/β) s`. For a CC ball of
/// radius `r` both are `r`. For a box, `β` is the larger of the sampled
/// maximum of `d(x_*, ·)` and the longest sampled John curve, and `α` is the
/// smaller of `dist(x_*, ∂U)` and `0.9 β` times the smallest sampled cone
/// slope;
/// `resolution` is the face-grid size per side.
pub fn john_params_with(spec: &DomainSpec, resolution: usize) -> Result<(f64, f64)> {
    validate(spec)?;
    match *spec {
        DomainSpec::CcBall { radius, .. } => Ok((radius, radius)),
        DomainSpec::Box { lo, hi } => {
            let m = resolution.max(2);
            let x_star = distinguished_point(spec);
            let dist = |p: Point| cc_dist(x_star, p);
            let mut best = SupEstimate {
                value: -1.0,
                argmax: x_star,
            };
            for p in face_points(lo, hi, 2 * m + 1) {
                let v = dist(p)?;
                if v > best.value {
                    best = SupEstimate { value: v, argmax: p };
                }
            }
            let mut beta = refine_in_box(lo, hi, &dist, best)?.value;

            let d_u = |p: Point| box_distance(lo, hi, p);
            let mut probes: Vec<Point> = face_points(lo, hi, m)
                .into_iter()
                .map(|b| {
                    let c = b.to_array();
                    let s = x_star.to_array();
                    Point::from_array(std::array::from_fn(|a| s[a] + (1.0 - 1e-6) * (c[a] - s[a])))
                })
                .collect();
            for i in 1..=8 * m {
                let c: [f64; 3] =
                    std::array::from_fn(|a| lo[a] + (hi[a] - lo[a]) * halton(i, [2, 3, 5][a]));
                probes.push(Point::from_array(c));
            }
            let mut slope = f64::INFINITY;
            for x in probes {
                let path = ascent_path(x, x_star, &d_u)?;
                beta = beta.max(path.length());
                slope = slope.min(path.cone_slope(&d_u)?);
            }
            let alpha = box_distance(lo, hi, x_star)?.min(ALPHA_MARGIN * beta * slope);
            if !(alpha > 0.0) {
                return Err(Error::Degenerate("a John curve touches the boundary".into()));
            }
            Ok((alpha, beta))
        }
    }
}

impl JohnDomain {
    pub fn new(spec: DomainSpec) -> Result<Self> {
        let (alpha, beta) = john_params(&spec)?;
        Ok(Self {
            spec,
            x_star: distinguished_point(&spec),
            alpha,
            beta,
        })
    }

    pub fn cc_ball(center: Point, radius: f64) -> Result<Self> {
        Self::new(DomainSpec::CcBall {
            center: center.to_array(),
            radius,
        })
    }

    pub fn coordinate_box(lo: [f64; 3], hi: [f64; 3]) -> Result<Self> {
        Self::new(DomainSpec::Box { lo, hi })
    }

    fn ball(&self) -> Option<Ball> {
        match self.spec {
            DomainSpec::CcBall { center, radius } => Some(Ball {
                center: Point::from_array(center),
                radius,
                metric: crate::group::Metric::Cc,
            }),
            DomainSpec::Box { .. } => None,
        }
    }

    /// `d_U(p) = dist(p, ∂U)`; zero outside. Exact for boxes; for balls the
    /// triangle-inequality value `r - d(c, p)`, which is a lower bound.
    pub fn boundary_distance(&self, p: Point) -> Result<f64> {
        match self.spec {
            DomainSpec::CcBall { center, radius } => {
                Ok((radius - cc_dist(Point::from_array(center), p)?).max(0.0))
            }
            DomainSpec::Box { lo, hi } => box_distance(lo, hi, p),
        }
    }

    /// Open-domain membership.
    pub fn contains(&self, p: Point) -> Result<bool> {
        Ok(self.boundary_distance(p)? > 0.0)
    }

    /// Axis-aligned box enclosing the domain.
    pub fn bounding_box(&self) -> ([f64; 3], [f64; 3]) {
        match self.spec {
            DomainSpec::CcBall { center, radius } => {
                let ball = self.ball().expect("ball domain");
                let ext = ball.unit_extent();
                // Left translation shears t by at most 2|c_z||z|.
                let c = Point::from_array(center);
                let shear = 2.0 * c.x.hypot(c.y) * radius;
                let half = [ext[0], ext[1], ext[2] + shear];
                (
                    std::array::from_fn(|a| center[a] - half[a]),
                    std::array::from_fn(|a| center[a] + half[a]),
                )
            }
            DomainSpec::Box { lo, hi } => (lo, hi),
        }
    }

    /// Grid on the bounding box enlarged by `margin` (relative).
    pub fn grid(&self, n: usize, margin: f64) -> Result<Grid> {
        let (lo, hi) = self.bounding_box();
        Ok(Grid::new(lo, hi, [n; 3])?.enlarged(1.0 + margin))
    }

    /// Quasi-uniform points of the closed domain.
    pub fn samples(&self, budget: SampleBudget) -> Result<Vec<Point>> {
        match self.spec {
            DomainSpec::CcBall { .. } => ball_samples(&self.ball().expect("ball domain"), budget),
            DomainSpec::Box { lo, hi } => {
                let mut out = Vec::with_capacity(budget.total());
                for i in 1..=budget.interior {
                    out.push(Point::from_array(std::array::from_fn(|a| {
                        lo[a] + (hi[a] - lo[a]) * halton(i, [2, 3, 5][a])
                    })));
                }
                for i in 1..=budget.boundary {
                    let axis = i % 3;
                    let side = if (i / 3) % 2 == 0 { lo[axis] } else { hi[axis] };
                    let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
                    let mut c = [0.0; 3];
                    c[axis] = side;
                    c[u] = lo[u] + (hi[u] - lo[u]) * halton(i, 7);
                    c[v] = lo[v] + (hi[v] - lo[v]) * halton(i, 11);
                    out.push(Point::from_array(c));
                }
                Ok(out)
            }
        }
    }

    /// Midpoint-rule cells of the domain, `n` per axis of its bounding box.
    pub fn quadrature(&self, n: usize) -> Result<Quadrature> {
        match self.spec {
            DomainSpec::CcBall { .. } => Quadrature::ball(&self.ball().expect("ball domain"), n),
            DomainSpec::Box { lo, hi } => Quadrature::boxed(lo, hi, n),
        }
    }

    /// Sampled supremum of `f` over the closed domain, refined locally.
    pub fn sup<F>(&self, f: F, budget: SampleBudget) -> Result<SupEstimate>
    where
        F: Fn(Point) -> Result<f64>,
    {
        let points = self.samples(budget)?;
        match self.spec {
            DomainSpec::CcBall { .. } => sup_over(&self.ball().expect("ball domain"), &points, f),
            DomainSpec::Box { lo, hi } => {
                let mut best = SupEstimate {
                    value: f64::NEG_INFINITY,
                    argmax: points[0],
                };
                for &p in &points {
                    let v = f(p)?;
                    if v > best.value {
                        best = SupEstimate { value: v, argmax: p };
                    }
                }
                refine_in_box(lo, hi, &f, best)
            }
        }
    }

    /// The John curve from `x` to `x_*`: the geodesic in a ball, a greedy
    /// polyline of geodesic pieces in a box.
    pub fn john_path(&self, x: Point) -> Result<JohnPath> {
        match self.spec {
            DomainSpec::CcBall { .. } => JohnPath::geodesic(x, self.x_star),
            DomainSpec::Box { lo, hi } => ascent_path(x, self.x_star, &|p| box_distance(lo, hi, p)),
        }
    }

    /// Point at arclength `s` along the John curve from `x` to `x_*`.
    pub fn john_curve(&self, x: Point, s: f64) -> Result<Point> {
        self.john_path(x)?.point_at(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_parameters() {
        assert_eq!(
            john_params(&DomainSpec::CcBall {
                center: [0.0; 3],
                radius: 2.0
            })
            .unwrap(),
            (2.0, 2.0)
        );
    }

    #[test]
    fn degenerate_box_is_rejected() {
        assert!(JohnDomain::coordinate_box([0.0; 3], [1e-9, 1e-9, 1e-9]).is_err());
        assert!(JohnDomain::coordinate_box([0.0; 3], [1.0, 1.0, 0.0]).is_err());
        // Tall boxes: geodesics to the center bulge through the side faces.
        assert!(matches!(
            JohnDomain::coordinate_box([-0.5, -0.5, -1.0], [0.5, 0.5, 1.0]),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn box_distance_matches_faces() {
        let d = box_distance([-1.0; 3], [1.0; 3], Point::new(0.9, 0.0, 0.0)).unwrap();
        assert!((d - 0.1).abs() < 1e-12);
        let d = box_distance([-1.0; 3], [1.0; 3], Point::new(0.0, 0.0, 0.96)).unwrap();
        assert!((d - (PI * 0.04 / 2.0).sqrt()).abs() < 1e-6);
        // Off-axis the twist helps: height can be gained by moving horizontally.
        let off = box_distance([-1.0; 3], [1.0; 3], Point::new(0.5, 0.0, 0.96)).unwrap();
        assert!(off < d);
        assert_eq!(box_distance([-1.0; 3], [1.0; 3], Point::new(2.0, 0.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn vertical_gap_is_a_true_minimum() {
        // Compare with direct minimization over the direction of w_z too.
        let p = Point::new(0.3, -0.4, 0.0);
        let delta = 0.2;
        let exact = vertical_gap(delta, p.x.hypot(p.y)).unwrap();
        let mut brute = f64::INFINITY;
        for i in 0..=400 {
            let m = 0.5 * i as f64 / 400.0;
            for k in 0..72 {
                let phi = k as f64 * std::f64::consts::TAU / 72.0;
                let (wx, wy) = (m * phi.cos(), m * phi.sin());
                let gain = 2.0 * (wx * p.y - p.x * wy);
                let wt = (delta - gain).max(0.0);
                brute = brute.min(cc_norm(Point::new(wx, wy, wt)).unwrap());
            }
        }
        assert!(exact <= brute + 1e-9 && brute - exact < 2e-3, "{exact} {brute}");
    }

    #[test]
    fn gap_lower_bound_is_below_the_gap() {
        for (delta, rho) in [(0.1, 0.0), (0.1, 0.3), (1e-4, 0.01), (0.5, 2.0)] {
            let lb = gap_lower_bound(delta, rho);
            assert!(lb <= vertical_gap(delta, rho).unwrap() + 1e-12, "{delta} {rho}");
        }
    }

    #[test]
    fn vertical_gap_over_the_axis_uses_the_ball_height() {
        // The unit ball reaches height 2/π, above its pole at 1/π.
        let d = 0.1;
        let g = vertical_gap(d, 0.0).unwrap();
        assert!((g - (PI * d / 2.0).sqrt()).abs() < 1e-6, "{g}");
        let near = vertical_gap(d, 1e-9).unwrap();
        assert!((near - g).abs() < 1e-6);
    }

    #[test]
    fn box_parameters_are_ordered_and_stable() {
        let spec = DomainSpec::Box {
            lo: [-1.0; 3],
            hi: [1.0; 3],
        };
        let (a, b) = john_params_with(&spec, 7).unwrap();
        let (a2, b2) = john_params_with(&spec, 13).unwrap();
        assert!(0.0 < a && a <= b);
        assert!((a - a2).abs() / a2 < 0.01, "{a} {a2}");
        assert!((b - b2).abs() / b2 < 0.01, "{b} {b2}");
    }

    #[test]
    fn samples_lie_in_the_closed_domain() {
        let d = JohnDomain::coordinate_box([-1.0, -1.0, -0.5], [1.0, 1.0, 0.5]).unwrap();
        for p in d.samples(SampleBudget::new(100, 60)).unwrap() {
            assert!(p.x.abs() <= 1.0 && p.y.abs() <= 1.0 && p.t.abs() <= 0.5);
        }
        let b = JohnDomain::cc_ball(Point::new(1.0, 0.0, 0.5), 0.5).unwrap();
        let (lo, hi) = b.bounding_box();
        for p in b.samples(SampleBudget::new(200, 60)).unwrap() {
            let c = p.to_array();
            assert!((0..3).all(|a| c[a] >= lo[a] - 1e-12 && c[a] <= hi[a] + 1e-12));
        }
    }
}
