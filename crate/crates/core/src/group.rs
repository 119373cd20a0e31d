//! Group arithmetic on the first Heisenberg group and its homogeneous gauges.
//!
//! Points are stored in exponential coordinates `(x, y, t)` with the product
//! `(x, y, t)·(x', y', t') = (x + x', y + y', t + t' - 2xy' + 2x'y)`.
//! The horizontal plane at every point is spanned by the left-invariant
//! fields `X = ∂x + 2y∂t` and `Y = ∂y - 2x∂t`, declared orthonormal.

use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cc;
use crate::error::{invalid, Result};

/// An element of the Heisenberg group.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl Point {
    pub const IDENTITY: Point = Point {
        x: 0.0,
        y: 0.0,
        t: 0.0,
    };

    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        Self { x, y, t }
    }

    pub fn from_complex(z: Complex64, t: f64) -> Self {
        Self::new(z.re, z.im, t)
    }

    /// Horizontal coordinate `z = x + iy`.
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    pub fn inv(&self) -> Self {
        Self::new(-self.x, -self.y, -self.t)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.t.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.t]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl Mul for Point {
    type Output = Point;

    fn mul(self, q: Point) -> Point {
        Point::new(
            self.x + q.x,
            self.y + q.y,
            self.t + q.t - 2.0 * self.x * q.y + 2.0 * q.x * self.y,
        )
    }
}

/// Group product `p·q`.
pub fn mul(p: Point, q: Point) -> Point {
    p * q
}

/// Group inverse; `(x, y, t)⁻¹ = (-x, -y, -t)`.
pub fn inv(p: Point) -> Point {
    p.inv()
}

/// Homogeneous dilation `δ_r(x, y, t) = (rx, ry, r²t)`.
pub fn dilate(r: f64, p: Point) -> Result<Point> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid("r", format!("dilation factor must be positive, got {r}")));
    }
    Ok(dilate_unchecked(r, p))
}

#[inline]
pub(crate) fn dilate_unchecked(r: f64, p: Point) -> Point {
    Point::new(r * p.x, r * p.y, r * r * p.t)
}

/// A horizontal tangent vector in the left-invariant frame `{X, Y}`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HVector {
    pub a: f64,
    pub b: f64,
}

impl HVector {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// Sub-Riemannian length; the frame is orthonormal.
    pub fn norm(&self) -> f64 {
        self.a.hypot(self.b)
    }
}

/// Korányi gauge `((x²+y²)² + t²)^{1/4}`.
pub fn koranyi_norm(p: Point) -> f64 {
    let r2 = p.x * p.x + p.y * p.y;
    (r2 * r2 + p.t * p.t).sqrt().sqrt()
}

/// Left-invariant Korányi distance `ρ(a⁻¹·b)`.
pub fn koranyi_dist(a: Point, b: Point) -> f64 {
    koranyi_norm(a.inv() * b)
}

/// Planar pseudometric: Euclidean distance of the horizontal projections.
pub fn d_h(p: Point, q: Point) -> f64 {
    (p.x - q.x).hypot(p.y - q.y)
}

/// Which distance a [`Ball`] is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Cc,
    Koranyi,
}

impl Metric {
    pub fn dist(self, a: Point, b: Point) -> Result<f64> {
        match self {
            Metric::Cc => cc::cc_dist(a, b),
            Metric::Koranyi => Ok(koranyi_dist(a, b)),
        }
    }
}

/// An open metric ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
    #[serde(default)]
    pub metric: Metric,
}

impl Ball {
    pub fn new(center: Point, radius: f64, metric: Metric) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("radius", format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self {
            center,
            radius,
            metric,
        })
    }

    pub fn cc(center: Point, radius: f64) -> Result<Self> {
        Self::new(center, radius, Metric::Cc)
    }

    pub fn unit() -> Self {
        Self {
            center: Point::IDENTITY,
            radius: 1.0,
            metric: Metric::Cc,
        }
    }

    /// Closed-ball membership.
    pub fn contains(&self, p: Point) -> Result<bool> {
        Ok(self.metric.dist(self.center, p)? <= self.radius)
    }

    /// Same center and metric, radius multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.center, self.radius * factor, self.metric)
    }

    /// Maps a point of the unit ball at the origin into this ball: `c·δ_r(p)`.
    /// Left translations and dilations carry metric balls onto metric balls.
    pub fn from_unit(&self, p: Point) -> Point {
        self.center * dilate_unchecked(self.radius, p)
    }

    /// Axis-aligned box enclosing the ball at the origin with this radius and metric.
    pub(crate) fn unit_extent(&self) -> [f64; 3] {
        let r = self.radius;
        match self.metric {
            // The arc plus its chord bounds the area, so |t| <= 2d²/π
            // (semicircle), and |z| <= d.
            Metric::Cc => [r, r, 2.0 * r * r / std::f64::consts::PI],
            Metric::Koranyi => [r, r, r * r],
        }
    }
}

/// Empirical equivalence constant `max(d/ρ, ρ/d)` over a set of points,
/// measured against the origin.
pub fn equivalence_constant(points: &[Point]) -> Result<f64> {
    let mut worst: f64 = 1.0;
    for &p in points {
        let rho = koranyi_norm(p);
        if rho == 0.0 {
            continue;
        }
        let d = cc::cc_norm(p)?;
        worst = worst.max(d / rho).max(rho / d);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Point, b: Point, tol: f64) -> bool {
        (a.x - b.x).abs() <= tol && (a.y - b.y).abs() <= tol && (a.t - b.t).abs() <= tol
    }

    #[test]
    fn group_law_examples() {
        assert_eq!(
            Point::new(1.0, 0.0, 0.0) * Point::new(0.0, 1.0, 0.0),
            Point::new(1.0, 1.0, -2.0)
        );
        let p = Point::new(1.5, -2.0, 0.25);
        assert_eq!(p * Point::IDENTITY, p);
        assert_eq!(
            Point::new(1.0, 2.0, 3.0) * Point::new(-1.0, -2.0, -3.0),
            Point::IDENTITY
        );
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inv(Point::IDENTITY), Point::IDENTITY);
        assert_eq!(inv(Point::new(1.0, 2.0, 3.0)), Point::new(-1.0, -2.0, -3.0));
        let p = Point::new(0.3, -7.0, 2.5);
        assert_eq!(inv(inv(p)), p);
    }

    #[test]
    fn dilation_examples() {
        assert_eq!(dilate(2.0, Point::new(1.0, 1.0, 1.0)).unwrap(), Point::new(2.0, 2.0, 4.0));
        let p = Point::new(0.4, -1.1, 3.0);
        assert_eq!(dilate(1.0, p).unwrap(), p);
        assert!(dilate(0.0, p).is_err());
        assert!(dilate(-1.0, p).is_err());
        let rs = dilate(3.0, dilate(0.5, p).unwrap()).unwrap();
        assert!(close(rs, dilate(1.5, p).unwrap(), 1e-14));
    }

    #[test]
    fn koranyi_examples() {
        assert!((koranyi_norm(Point::new(1.0, 1.0, 0.0)) - 2f64.sqrt()).abs() < 1e-15);
        assert!((koranyi_norm(Point::new(0.0, 0.0, 4.0)) - 2.0).abs() < 1e-15);
        let p = Point::new(0.7, -0.2, 1.3);
        let scaled = koranyi_norm(dilate(3.0, p).unwrap());
        assert!((scaled - 3.0 * koranyi_norm(p)).abs() < 1e-13);
    }

    #[test]
    fn pseudometric_examples() {
        assert_eq!(d_h(Point::IDENTITY, Point::new(0.0, 0.0, 7.0)), 0.0);
        assert_eq!(d_h(Point::new(1.0, 0.0, 0.0), Point::IDENTITY), 1.0);
        assert_eq!(d_h(Point::new(3.0, 4.0, 1.0), Point::new(0.0, 0.0, -5.0)), 5.0);
    }

    #[test]
    fn ball_rejects_bad_radius() {
        assert!(Ball::cc(Point::IDENTITY, 0.0).is_err());
        assert!(Ball::cc(Point::IDENTITY, f64::NAN).is_err());
    }

    #[test]
    fn horizontal_vector_length() {
        assert_eq!(HVector::new(3.0, 4.0).norm(), 5.0);
    }
}
