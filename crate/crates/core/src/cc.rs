//! Carnot–Carathéodory distance.
//!
//! Along a horizontal curve issued from the origin `ṫ = 2yẋ - 2xẏ`, so the
//! endpoint height is `-4` times the signed area enclosed by the planar
//! projection and its chord. Length minimizers therefore project to circular
//! arcs (Dido's problem). For a target `(z, t)` with chord `c = |z|` and arc
//! half-angle `θ`:
//!
//! ```text
//!   |t| = c² (2θ - sin 2θ) / (2 sin² θ),      d = c θ / sin θ.
//! ```
//!
//! The scalar equation is solved for `θ` by safeguarded Newton iteration on a
//! bracket. Beyond a half circle the unknown is switched to `δ = π - θ` so
//! that nearly closed loops keep full relative precision.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::Point;

const MAX_ITER: usize = 200;
/// Relative tolerance on the arc-angle residual.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// `u - sin u`, accurate for small `u`.
pub(crate) fn u_minus_sin(u: f64) -> f64 {
    if u.abs() < 0.25 {
        let u2 = u * u;
        // u³/3! - u⁵/5! + u⁷/7! - u⁹/9! + u¹¹/11!
        u * u2
            * (1.0 / 6.0
                - u2 * (1.0 / 120.0
                    - u2 * (1.0 / 5040.0 - u2 * (1.0 / 362_880.0 - u2 / 39_916_800.0))))
    } else {
        u - u.sin()
    }
}

/// Which side of a half circle the minimizing arc lies on.
#[derive(Debug, Clone, Copy)]
enum ArcAngle {
    /// Half-angle `θ ∈ [0, π/2]`.
    Minor(f64),
    /// Complement `δ = π - θ ∈ (0, π/2)`.
    Major(f64),
}

impl ArcAngle {
    fn half_angle(self) -> f64 {
        match self {
            ArcAngle::Minor(theta) => theta,
            ArcAngle::Major(delta) => PI - delta,
        }
    }

    /// `θ / sin θ`, the ratio of arc length to chord.
    fn length_ratio(self) -> f64 {
        match self {
            ArcAngle::Minor(theta) if theta < 1e-8 => 1.0 + theta * theta / 6.0,
            ArcAngle::Minor(theta) => theta / theta.sin(),
            ArcAngle::Major(delta) => (PI - delta) / delta.sin(),
        }
    }
}

/// Safeguarded Newton iteration for a monotone function on `[lo, hi]` whose
/// values at the ends have opposite signs.
fn bracketed_newton(
    f: impl Fn(f64) -> (f64, f64),
    mut lo: f64,
    mut hi: f64,
    scale: f64,
) -> Result<f64> {
    let (f_lo, _) = f(lo);
    let increasing = f_lo < 0.0;
    let mut x = 0.5 * (lo + hi);
    let mut last = f64::INFINITY;
    for _ in 0..MAX_ITER {
        let (fx, dfx) = f(x);
        last = fx;
        if fx.abs() <= 1e-15 * scale {
            return Ok(x);
        }
        if (fx < 0.0) == increasing {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx.is_finite() && dfx != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            x = next;
            break;
        }
        x = next;
        if hi - lo <= 2.0 * f64::EPSILON * hi.abs() {
            break;
        }
    }
    let (fx, _) = f(x);
    last = if fx.is_finite() { fx } else { last };
    if last.abs() <= RESIDUAL_TOL * scale {
        Ok(x)
    } else {
        Err(Error::RootFind {
            iterations: MAX_ITER,
            residual: last / scale,
        })
    }
}

/// Solves for the arc angle given the ratio `k = |t| / c²`.
fn solve_arc(k: f64) -> Result<ArcAngle> {
    if k == 0.0 {
        return Ok(ArcAngle::Minor(0.0));
    }
    let scale = k.max(1.0);
    if k <= FRAC_PI_2 {
        // (2θ - sin 2θ)/(2 sin² θ) increases from 0 to π/2 on [0, π/2].
        let g = |theta: f64| {
            let num = u_minus_sin(2.0 * theta);
            let s = theta.sin();
            let den = 2.0 * s * s;
            if den == 0.0 {
                return (-k, 2.0 / 3.0);
            }
            let val = num / den - k;
            let dval = 2.0 - 2.0 * num * (2.0 * theta).sin() / (den * den);
            (val, dval)
        };
        let lo = 0.0;
        let hi = FRAC_PI_2;
        bracketed_newton(g, lo, hi, scale).map(ArcAngle::Minor)
    } else {
        // (2π - 2δ + sin 2δ)/(2 sin² δ) decreases from ∞ to π/2 on (0, π/2].
        let h = |delta: f64| {
            let num = 2.0 * PI - 2.0 * delta + (2.0 * delta).sin();
            let s = delta.sin();
            let den = 2.0 * s * s;
            let val = num / den - k;
            let dval = -2.0 - 2.0 * num * (2.0 * delta).sin() / (den * den);
            (val, dval)
        };
        let mut lo = 0.5 * (PI / k).sqrt().min(FRAC_PI_2);
        while h(lo).0 <= 0.0 {
            lo *= 0.5;
        }
        bracketed_newton(h, lo, FRAC_PI_2, scale).map(ArcAngle::Major)
    }
}

/// Distance from the origin.
pub fn cc_norm(p: Point) -> Result<f64> {
    let c = p.x.hypot(p.y);
    let tau = p.t.abs();
    if tau == 0.0 {
        return Ok(c);
    }
    if c == 0.0 {
        // Full circle: |t| = 4πR², length 2πR.
        return Ok((PI * tau).sqrt());
    }
    let k = tau / (c * c);
    if !k.is_finite() {
        return Ok((PI * tau).sqrt());
    }
    Ok(c * solve_arc(k)?.length_ratio())
}

/// Carnot–Carathéodory distance `d(p, q) = d(p⁻¹·q, 0)`.
pub fn cc_dist(p: Point, q: Point) -> Result<f64> {
    cc_norm(p.inv() * q)
}

/// Point at fraction `s ∈ [0, 1]` of the length of a minimizing geodesic
/// from `p` to `q`.
pub fn geodesic_point(p: Point, q: Point, s: f64) -> Result<Point> {
    let w = p.inv() * q;
    let c = w.x.hypot(w.y);
    let tau = w.t.abs();
    if tau == 0.0 {
        return Ok(p * Point::new(s * w.x, s * w.y, 0.0));
    }
    let (theta, chord_dir) = if c == 0.0 {
        (PI, 0.0)
    } else {
        let k = tau / (c * c);
        let theta = if k.is_finite() {
            solve_arc(k)?.half_angle()
        } else {
            PI
        };
        (theta, w.y.atan2(w.x))
    };
    let length = cc_norm(w)?;
    let radius = length / (2.0 * theta);
    // Counter-clockwise arcs enclose positive area and descend in t.
    let sigma = if w.t < 0.0 { 1.0 } else { -1.0 };
    let heading = chord_dir - sigma * theta;
    let u = s * length;
    let alpha = u / radius;
    let half = 0.5 * alpha;
    // e^{iσα} - 1 = -2 sin²(α/2) + iσ sin α
    let chord = Complex64::new(-2.0 * half.sin() * half.sin(), sigma * alpha.sin());
    let z = Complex64::from_polar(1.0, heading) * chord * Complex64::new(0.0, -sigma) * radius;
    let t = -sigma * 2.0 * radius * radius * u_minus_sin(alpha);
    Ok(p * Point::new(z.re, z.im, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{dilate, koranyi_norm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng, scale: f64) -> Point {
        Point::new(
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
            rng.gen_range(-scale..scale),
        )
    }

    #[test]
    fn horizontal_segment_is_exact() {
        assert_eq!(cc_norm(Point::new(5.0, 0.0, 0.0)).unwrap(), 5.0);
        assert_eq!(cc_norm(Point::new(3.0, -4.0, 0.0)).unwrap(), 5.0);
    }

    #[test]
    fn vertical_axis_closed_form() {
        let d = cc_norm(Point::new(0.0, 0.0, 4.0)).unwrap();
        assert!((d - (4.0 * PI).sqrt()).abs() < 1e-14);
        let d = cc_norm(Point::new(0.0, 0.0, -4.0)).unwrap();
        assert!((d - (4.0 * PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn continuous_toward_both_axes() {
        let t = 2.0;
        let axis = cc_norm(Point::new(0.0, 0.0, t)).unwrap();
        let near = cc_norm(Point::new(1e-9, 0.0, t)).unwrap();
        assert!((axis - near).abs() < 1e-6);
        let flat = cc_norm(Point::new(1.0, 0.0, 1e-12)).unwrap();
        assert!((flat - 1.0).abs() < 1e-10);
    }

    #[test]
    fn homogeneous_and_left_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p = random_point(&mut rng, 3.0);
            let q = random_point(&mut rng, 3.0);
            let g = random_point(&mut rng, 3.0);
            let d = cc_dist(p, q).unwrap();
            let d2 = cc_dist(dilate(2.0, p).unwrap(), dilate(2.0, q).unwrap()).unwrap();
            assert!((d2 - 2.0 * d).abs() <= 1e-9 * d.max(1.0));
            let dg = cc_dist(g * p, g * q).unwrap();
            assert!((dg - d).abs() <= 1e-9 * d.max(1.0));
            assert!((cc_dist(q, p).unwrap() - d).abs() <= 1e-9 * d.max(1.0));
        }
    }

    #[test]
    fn lower_bound_and_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let a = random_point(&mut rng, 2.0);
            let b = random_point(&mut rng, 2.0);
            let c = random_point(&mut rng, 2.0);
            let ab = cc_dist(a, b).unwrap();
            assert!(ab + 1e-12 >= (a.inv() * b).z().norm());
            let ac = cc_dist(a, c).unwrap();
            let cb = cc_dist(c, b).unwrap();
            assert!(ab <= ac + cb + 1e-8);
        }
    }

    #[test]
    fn equivalent_to_koranyi() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut worst: f64 = 1.0;
        for _ in 0..2000 {
            let p = random_point(&mut rng, 5.0);
            let ratio = cc_norm(p).unwrap() / koranyi_norm(p);
            worst = worst.max(ratio).max(1.0 / ratio);
        }
        // On the t-axis d/ρ = √π, the largest ratio attained.
        assert!(worst < 2.0, "{worst}");
        assert!(worst > 1.5, "{worst}");
    }

    #[test]
    fn geodesic_points_have_proportional_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let p = random_point(&mut rng, 2.0);
            let q = random_point(&mut rng, 2.0);
            let d = cc_dist(p, q).unwrap();
            assert!((geodesic_point(p, q, 0.0).unwrap().t - p.t).abs() < 1e-12);
            let end = geodesic_point(p, q, 1.0).unwrap();
            let err = (end.x - q.x).abs() + (end.y - q.y).abs() + (end.t - q.t).abs();
            assert!(err < 1e-9 * d.max(1.0), "{end:?} vs {q:?}");
            for s in [0.25, 0.5, 0.8] {
                let m = geodesic_point(p, q, s).unwrap();
                let dm = cc_dist(p, m).unwrap();
                assert!((dm - s * d).abs() < 1e-7 * d.max(1.0), "{dm} vs {}", s * d);
                let rest = cc_dist(m, q).unwrap();
                assert!((rest - (1.0 - s) * d).abs() < 1e-7 * d.max(1.0));
            }
        }
    }

    #[test]
    fn geodesic_on_vertical_axis() {
        let q = Point::new(0.0, 0.0, 1.0);
        let end = geodesic_point(Point::IDENTITY, q, 1.0).unwrap();
        assert!(end.x.abs() + end.y.abs() + (end.t - 1.0).abs() < 1e-12);
        let mid = geodesic_point(Point::IDENTITY, q, 0.5).unwrap();
        let d = cc_norm(q).unwrap();
        assert!((cc_norm(mid).unwrap() - 0.5 * d).abs() < 1e-9);
    }
}
