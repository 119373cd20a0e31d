//! Isometries of the Heisenberg group in canonical form.
//!
//! Every isometry is `x ↦ a · R_A(ι^σ(x))` where `ι(z, t) = (z̄, -t)`,
//! `R_A(z, t) = (e^{iA} z, t)` and `a·` is a left translation. Rotations and
//! the reflection are group automorphisms, and `ι ∘ R_B = R_{-B} ∘ ι`, which
//! is enough to keep compositions and inverses in this form.

use std::f64::consts::TAU;

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::group::{d_h, Ball, Point};
use crate::sampling::{ball_samples, sup_over, SampleBudget};

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Canonical isometry `x ↦ trans · R_angle(ι^reflect(x))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    pub reflect: bool,
    pub angle: f64,
    pub trans: Point,
}

impl Default for Isometry {
    fn default() -> Self {
        Self::identity()
    }
}

fn reflect_point(p: Point) -> Point {
    Point::new(p.x, -p.y, -p.t)
}

fn rotate_point(angle: f64, p: Point) -> Point {
    let (s, c) = angle.sin_cos();
    Point::new(c * p.x - s * p.y, s * p.x + c * p.y, p.t)
}

impl Isometry {
    pub fn new(reflect: bool, angle: f64, trans: Point) -> Self {
        Self {
            reflect,
            angle: wrap_angle(angle),
            trans,
        }
    }

    pub fn identity() -> Self {
        Self::new(false, 0.0, Point::IDENTITY)
    }

    pub fn rotation(angle: f64) -> Self {
        Self::new(false, angle, Point::IDENTITY)
    }

    pub fn reflection() -> Self {
        Self::new(true, 0.0, Point::IDENTITY)
    }

    /// Left translation `x ↦ a·x`.
    pub fn translation(a: Point) -> Self {
        Self::new(false, 0.0, a)
    }

    pub fn apply(&self, p: Point) -> Point {
        let q = if self.reflect { reflect_point(p) } else { p };
        self.trans * rotate_point(self.angle, q)
    }

    /// Action on the horizontal coordinate, `z ↦ a_z + e^{iA} c_σ(z)`.
    pub fn apply_planar(&self, z: Complex64) -> Complex64 {
        let w = if self.reflect { z.conj() } else { z };
        self.trans.z() + Complex64::from_polar(1.0, self.angle) * w
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let moved = {
            let b = if self.reflect {
                reflect_point(other.trans)
            } else {
                other.trans
            };
            rotate_point(self.angle, b)
        };
        let angle = if self.reflect {
            self.angle - other.angle
        } else {
            self.angle + other.angle
        };
        Isometry::new(self.reflect ^ other.reflect, angle, self.trans * moved)
    }

    pub fn inverse(&self) -> Isometry {
        let back = rotate_point(-self.angle, self.trans.inv());
        let trans = if self.reflect { reflect_point(back) } else { back };
        let angle = if self.reflect { self.angle } else { -self.angle };
        Isometry::new(self.reflect, angle, trans)
    }

    /// Constant horizontal differential in the frame `{X, Y}`.
    pub fn horizontal_matrix(&self) -> Matrix2<f64> {
        let (s, c) = self.angle.sin_cos();
        let sign = if self.reflect { -1.0 } else { 1.0 };
        Matrix2::new(c, -s * sign, s, c * sign)
    }

    /// `+1` when the horizontal differential preserves orientation.
    pub fn orientation(&self) -> i8 {
        if self.reflect {
            -1
        } else {
            1
        }
    }

    /// Largest absolute difference between canonical fields, with the angle
    /// compared on the circle.
    pub fn field_distance(&self, other: &Isometry) -> f64 {
        if self.reflect != other.reflect {
            return f64::INFINITY;
        }
        let da = (self.angle - other.angle).rem_euclid(TAU);
        let da = da.min(TAU - da);
        da.max((self.trans.x - other.trans.x).abs())
            .max((self.trans.y - other.trans.y).abs())
            .max((self.trans.t - other.trans.t).abs())
    }
}

/// Spectral norm of a 2×2 matrix.
pub fn op_norm(m: &Matrix2<f64>) -> f64 {
    singular_values(m).0
}

/// Singular values `(σ_max, σ_min)` of a 2×2 matrix, in closed form.
pub fn singular_values(m: &Matrix2<f64>) -> (f64, f64) {
    // Split into conformal and anti-conformal parts: σ = |p| ± |q|.
    let e = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let f = 0.5 * (m[(0, 0)] - m[(1, 1)]);
    let g = 0.5 * (m[(1, 0)] + m[(0, 1)]);
    let h = 0.5 * (m[(1, 0)] - m[(0, 1)]);
    let p = e.hypot(h);
    let q = f.hypot(g);
    (p + q, (p - q).abs())
}

/// Measured quantities of the isometry deviation-scaling check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationScaling {
    /// Sampled `sup d^H(Φ(x), x)` over `B(a, r)`.
    pub sup_inner: f64,
    /// Sampled `sup d^H(Φ(x), x)` over `B(a, s r)`.
    pub sup_outer: f64,
    /// `|D_h Φ - I|` in the spectral norm.
    pub dh_matrix_dev: f64,
}

impl DeviationScaling {
    pub fn epsilon(&self, r: f64) -> f64 {
        self.sup_inner / r
    }

    /// Whether `sup_outer <= (2s+1) r ε` and `|D_hΦ - I| <= 2ε`, each with the
    /// multiplicative sampling `slack`.
    pub fn holds(&self, r: f64, s: f64, slack: f64) -> bool {
        let eps = self.epsilon(r);
        let floor = 1e-12;
        self.sup_outer <= (2.0 * s + 1.0) * r * eps * slack + floor
            && self.dh_matrix_dev <= 2.0 * eps * slack + floor
    }
}

/// Samples the deviation of `phi` from the identity on `B(a, r)` and on the
/// enlarged ball `B(a, s r)`.
pub fn deviation_scaling_check(
    phi: &Isometry,
    a: Point,
    r: f64,
    s: f64,
    budget: SampleBudget,
) -> Result<DeviationScaling> {
    if !(s >= 1.0) {
        return Err(invalid("s", format!("scale factor must be at least 1, got {s}")));
    }
    let inner = Ball::cc(a, r)?;
    let outer = Ball::cc(a, s * r)?;
    let dev = |p: Point| Ok(d_h(phi.apply(p), p));
    let sup_inner = sup_over(&inner, &ball_samples(&inner, budget)?, dev)?.value;
    let sup_outer = sup_over(&outer, &ball_samples(&outer, budget)?, dev)?.value;
    let dh_matrix_dev = op_norm(&(phi.horizontal_matrix() - Matrix2::identity()));
    Ok(DeviationScaling {
        sup_inner,
        sup_outer,
        dh_matrix_dev,
    })
}
