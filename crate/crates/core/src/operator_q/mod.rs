//! The operator `Q u = (Re Zu, Z̄u)` on complex fields, with `Z = (X - iY)/2`
//! and `Z̄ = (X + iY)/2`, its five-dimensional kernel, the `L₂` projection
//! onto the kernel, and the numerical checks built on them.

mod bso;
mod coercive;
mod main_ineq;

use std::fmt;
use std::sync::Arc;

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{x_flow, y_flow, Quadrature};
use crate::group::Point;

pub use bso::{bso_exp_check, bso_test_balls, largest_c2, BsoInput, BsoReport};
pub use coercive::{coercive_ratio, coercive_study, random_polynomial, CoerciveRow, CoerciveStudy, MONOMIALS};
pub use main_ineq::{main_inequality_residual, MainInequality};

const I: Complex64 = Complex64::new(0.0, 1.0);
/// Largest accepted condition number of the kernel Gram matrix.
pub const GRAM_CONDITION_LIMIT: f64 = 1e8;

/// Coordinates `(a, k, b)` of `a + ikz + tb + iz²b̄ + i|z|²b` in `ker Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub a: Complex64,
    pub k: f64,
    pub b: Complex64,
}

impl KernelParams {
    pub fn new(a: Complex64, k: f64, b: Complex64) -> Self {
        Self { a, k, b }
    }

    pub fn value(&self, p: Point) -> Complex64 {
        let z = p.z();
        self.a + I * self.k * z + p.t * self.b + I * z * z * self.b.conj() + I * z.norm_sqr() * self.b
    }

    /// Entries uniform in `[-1, 1]`.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let mut u = || rng.gen_range(-1.0..1.0);
        Self {
            a: Complex64::new(u(), u()),
            k: u(),
            b: Complex64::new(u(), u()),
        }
    }

    fn to_coords(self) -> [f64; 5] {
        [self.a.re, self.a.im, self.k, self.b.re, self.b.im]
    }

    fn from_coords(c: [f64; 5]) -> Self {
        Self {
            a: Complex64::new(c[0], c[1]),
            k: c[2],
            b: Complex64::new(c[3], c[4]),
        }
    }

    /// Largest coordinate difference.
    pub fn max_diff(&self, other: &KernelParams) -> f64 {
        let (a, b) = (self.to_coords(), other.to_coords());
        (0..5).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
    }
}

type ComplexRule = Arc<dyn Fn(Point) -> Complex64 + Send + Sync>;

/// A complex-valued function on `H¹` with flow-line differences.
#[derive(Clone)]
pub struct ComplexField {
    rule: ComplexRule,
    /// Flow parameter of the central differences.
    pub step: f64,
}

impl fmt::Debug for ComplexField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComplexField").field("step", &self.step).finish()
    }
}

impl ComplexField {
    pub const DEFAULT_STEP: f64 = 1e-3;

    pub fn new<F>(f: F) -> Self
    where
        F: Fn(Point) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            rule: Arc::new(f),
            step: Self::DEFAULT_STEP,
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    pub fn value(&self, p: Point) -> Complex64 {
        (self.rule)(p)
    }

    pub fn values(&self, points: &[Point]) -> Vec<Complex64> {
        points.iter().map(|&p| self.value(p)).collect()
    }

    /// `(Xu, Yu)` by central differences along the flows.
    pub fn horizontal_derivatives(&self, p: Point) -> (Complex64, Complex64) {
        let h = self.step;
        let xu = (self.value(x_flow(p, h)) - self.value(x_flow(p, -h))) / (2.0 * h);
        let yu = (self.value(y_flow(p, h)) - self.value(y_flow(p, -h))) / (2.0 * h);
        (xu, yu)
    }

    /// `(Zu, Z̄u)`.
    pub fn complex_derivatives(&self, p: Point) -> (Complex64, Complex64) {
        let (xu, yu) = self.horizontal_derivatives(p);
        (0.5 * (xu - I * yu), 0.5 * (xu + I * yu))
    }

    pub fn sum(&self, other: &ComplexField, alpha: Complex64, beta: Complex64) -> ComplexField {
        let (f, g) = (self.clone(), other.clone());
        ComplexField::new(move |p| alpha * f.value(p) + beta * g.value(p)).with_step(self.step)
    }
}

/// `Qu` at one point given `(Zu, Z̄u)`.
pub fn q_from_derivatives(zu: Complex64, zbar_u: Complex64) -> (f64, Complex64) {
    (zu.re, zbar_u)
}

/// Euclidean length of `Qu = (Re Zu, Z̄u)` in `ℝ × ℂ`.
pub fn q_magnitude(q: (f64, Complex64)) -> f64 {
    (q.0 * q.0 + q.1.norm_sqr()).sqrt()
}

/// `Qu` at every point.
pub fn q_apply(u: &ComplexField, points: &[Point]) -> Vec<(f64, Complex64)> {
    points
        .iter()
        .map(|&p| {
            let (zu, zbar_u) = u.complex_derivatives(p);
            q_from_derivatives(zu, zbar_u)
        })
        .collect()
}

/// The kernel element with the given coordinates.
pub fn kernel_field(params: KernelParams) -> ComplexField {
    ComplexField::new(move |p| params.value(p))
}

/// The five real generators `1, i, iz, t + iz² + i|z|², it + z² - |z|²`.
fn generators(p: Point) -> [Complex64; 5] {
    let z = p.z();
    let r2 = z.norm_sqr();
    [
        Complex64::new(1.0, 0.0),
        I,
        I * z,
        p.t + I * z * z + I * r2,
        I * p.t + z * z - r2,
    ]
}

/// Real `L₂` inner product `Re ∫ u v̄` on the quadrature cells.
pub fn inner(quad: &Quadrature, u: &[Complex64], v: &[Complex64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a * b.conj()).re).sum::<f64>() * quad.cell_volume
}

/// Orthogonal projection onto `ker Q` in `L₂` of the quadrature region.
#[derive(Debug, Clone)]
pub struct KernelProjector {
    quad: Quadrature,
    gens: Vec<[Complex64; 5]>,
    chol: nalgebra::Cholesky<f64, nalgebra::Const<5>>,
    pub condition: f64,
}

impl KernelProjector {
    pub fn new(quad: Quadrature) -> Result<Self> {
        let gens: Vec<[Complex64; 5]> = quad.points.iter().map(|&p| generators(p)).collect();
        let mut gram = SMatrix::<f64, 5, 5>::zeros();
        for g in &gens {
            for i in 0..5 {
                for j in 0..5 {
                    gram[(i, j)] += (g[i] * g[j].conj()).re;
                }
            }
        }
        gram *= quad.cell_volume;
        let eig = gram.symmetric_eigenvalues();
        let (lo, hi) = (eig.min(), eig.max());
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if condition > GRAM_CONDITION_LIMIT {
            return Err(Error::IllConditioned(condition));
        }
        let chol = gram.cholesky().ok_or(Error::IllConditioned(condition))?;
        Ok(Self {
            quad,
            gens,
            chol,
            condition,
        })
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quad
    }

    /// Coordinates of the projection of the sampled field `values`.
    pub fn project_values(&self, values: &[Complex64]) -> KernelParams {
        let mut rhs = SVector::<f64, 5>::zeros();
        for (u, g) in values.iter().zip(&self.gens) {
            for j in 0..5 {
                rhs[j] += (u * g[j].conj()).re;
            }
        }
        rhs *= self.quad.cell_volume;
        let c = self.chol.solve(&rhs);
        KernelParams::from_coords([c[0], c[1], c[2], c[3], c[4]])
    }

    pub fn project(&self, u: &ComplexField) -> KernelParams {
        self.project_values(&u.values(&self.quad.points))
    }
}

/// Coordinates of the projection of `u` onto `ker Q` over the quadrature region.
pub fn project_kernel(u: &ComplexField, quad: &Quadrature) -> Result<KernelParams> {
    Ok(KernelProjector::new(quad.clone())?.project(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;
    use crate::group::Ball;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn q_examples() {
        let pts = Grid::cube(1.0, 5).unwrap().nodes();
        for q in q_apply(&ComplexField::new(|_| c(2.0, -1.0)), &pts) {
            assert!(q_magnitude(q) < 1e-12);
        }
        for q in q_apply(&ComplexField::new(|p| I * p.z()), &pts) {
            assert!(q_magnitude(q) < 1e-10);
        }
        for (re, zb) in q_apply(&ComplexField::new(|p| p.z()), &pts) {
            assert!((re - 1.0).abs() < 1e-10 && zb.norm() < 1e-10);
        }
    }

    #[test]
    fn kernel_field_examples() {
        let p = Point::new(0.3, -0.7, 0.2);
        assert_eq!(KernelParams::new(c(1.0, 0.0), 0.0, c(0.0, 0.0)).value(p), c(1.0, 0.0));
        let v = KernelParams::new(c(0.0, 0.0), 1.0, c(0.0, 0.0)).value(Point::new(1.0, 0.0, 0.0));
        assert_eq!(v, I);
        let v = KernelParams::new(c(0.0, 0.0), 0.0, c(1.0, 0.0)).value(Point::new(1.0, 0.0, 2.0));
        assert_eq!(v, c(2.0, 2.0));
    }

    #[test]
    fn kernel_is_annihilated_and_q_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts = Grid::cube(1.0, 9).unwrap().nodes();
        for _ in 0..10 {
            let u = kernel_field(KernelParams::random(&mut rng));
            assert!(q_apply(&u, &pts).into_iter().all(|q| q_magnitude(q) < 1e-10));
        }
        let u = ComplexField::new(|p| p.z() * p.z() * p.t);
        let v = ComplexField::new(|p| c(p.x.sin(), p.t));
        let (al, be) = (0.3, -2.0);
        let w = u.sum(&v, c(al, 0.0), c(be, 0.0));
        for ((qu, qv), qw) in q_apply(&u, &pts).iter().zip(q_apply(&v, &pts)).zip(q_apply(&w, &pts)) {
            assert!((al * qu.0 + be * qv.0 - qw.0).abs() < 1e-9);
            assert!((al * qu.1 + be * qv.1 - qw.1).norm() < 1e-9);
        }
    }

    #[test]
    fn projection_fixes_kernel_and_is_idempotent() {
        let quad = Quadrature::ball(&Ball::unit(), 14).unwrap();
        let proj = KernelProjector::new(quad).unwrap();
        assert!(proj.condition < GRAM_CONDITION_LIMIT);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let kp = KernelParams::random(&mut rng);
            assert!(proj.project(&kernel_field(kp)).max_diff(&kp) < 1e-9);
        }
        let u = ComplexField::new(|p| c(p.x * p.x * p.y, (p.t * 3.0).cos()));
        let pu = proj.project(&u);
        assert!(proj.project(&kernel_field(pu)).max_diff(&pu) < 1e-10);
        let residual = u.sum(&kernel_field(pu), c(1.0, 0.0), c(-1.0, 0.0));
        let r = proj.project(&residual);
        assert!(r.max_diff(&KernelParams::new(c(0.0, 0.0), 0.0, c(0.0, 0.0))) < 1e-10);
    }

    #[test]
    fn tiny_region_is_ill_conditioned() {
        let quad = Quadrature::ball(&Ball::cc(Point::IDENTITY, 1e-3).unwrap(), 6).unwrap();
        assert!(matches!(KernelProjector::new(quad), Err(Error::IllConditioned(_))));
    }
}
