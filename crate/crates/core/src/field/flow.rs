//! Contact flows generated by a Hamiltonian.
//!
//! For the contact form `θ = dt - 2y dx + 2x dy` the field with
//! `θ(V) = H` is `V = -(YH/4) X + (XH/4) Y + H ∂t`. Its time-`s` flow is a
//! contact diffeomorphism, integrated here with classical RK4.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Grid, SampledMap};
use crate::error::{invalid, Error, Result};
use crate::group::Point;

/// `H = Σ cᵢ mᵢ` over the terms `1, x, y, t, x², xy, y², sin x sin y`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Potential {
    pub coeffs: [f64; 8],
}

impl Potential {
    pub const fn new(coeffs: [f64; 8]) -> Self {
        Self { coeffs }
    }

    pub const fn zero() -> Self {
        Self::new([0.0; 8])
    }

    pub const fn constant(c: f64) -> Self {
        Self::new([c, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    }

    /// `H = x`: a horizontal left translation.
    pub const fn linear_x() -> Self {
        Self::new([0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    }

    /// `H = xy`: a horizontal squeeze.
    pub const fn xy() -> Self {
        Self::new([0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0])
    }

    /// `H = sin x sin y`, a genuinely nonlinear flow.
    pub const fn wave() -> Self {
        Self::new([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0])
    }

    /// Coefficients drawn uniformly from `[-scale, scale]`.
    pub fn random<R: Rng>(rng: &mut R, scale: f64) -> Self {
        Self::new(std::array::from_fn(|_| rng.gen_range(-scale..=scale)))
    }

    pub fn value(&self, p: Point) -> f64 {
        let c = &self.coeffs;
        c[0] + c[1] * p.x
            + c[2] * p.y
            + c[3] * p.t
            + c[4] * p.x * p.x
            + c[5] * p.x * p.y
            + c[6] * p.y * p.y
            + c[7] * p.x.sin() * p.y.sin()
    }

    /// `(XH, YH)`.
    pub fn horizontal_gradient(&self, p: Point) -> (f64, f64) {
        let c = &self.coeffs;
        let (sx, cx) = p.x.sin_cos();
        let (sy, cy) = p.y.sin_cos();
        let hx = c[1] + 2.0 * c[4] * p.x + c[5] * p.y + c[7] * cx * sy;
        let hy = c[2] + c[5] * p.x + 2.0 * c[6] * p.y + c[7] * sx * cy;
        let ht = c[3];
        (hx + 2.0 * p.y * ht, hy - 2.0 * p.x * ht)
    }
}

/// Coordinate velocity of the contact field of `pot` at `p`.
pub fn contact_velocity(pot: &Potential, p: Point) -> Point {
    let (xh, yh) = pot.horizontal_gradient(p);
    let a = -0.25 * yh;
    let b = 0.25 * xh;
    Point::new(a, b, 2.0 * p.y * a - 2.0 * p.x * b + pot.value(p))
}

fn axpy(p: Point, h: f64, v: Point) -> Point {
    Point::new(p.x + h * v.x, p.y + h * v.y, p.t + h * v.t)
}

/// Time-`time` flow of `p`, `steps` RK4 steps. Fails if the trajectory
/// leaves `bounds`.
pub fn flow_point(pot: &Potential, p: Point, time: f64, steps: usize, bounds: &Grid) -> Result<Point> {
    if steps == 0 {
        return Err(invalid("rk_steps", "need at least one step"));
    }
    let h = time / steps as f64;
    let mut q = p;
    for _ in 0..steps {
        let k1 = contact_velocity(pot, q);
        let k2 = contact_velocity(pot, axpy(q, 0.5 * h, k1));
        let k3 = contact_velocity(pot, axpy(q, 0.5 * h, k2));
        let k4 = contact_velocity(pot, axpy(q, h, k3));
        q = Point::new(
            q.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
            q.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
            q.t + h / 6.0 * (k1.t + 2.0 * k2.t + 2.0 * k3.t + k4.t),
        );
        if !bounds.contains(q) || !q.is_finite() {
            return Err(Error::FlowEscaped { start: p });
        }
    }
    Ok(q)
}

/// How a flow map is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    /// Integrate on every evaluation.
    #[default]
    Analytic,
    /// Integrate once per node and interpolate.
    Tabulated,
}

/// The time-`time` contact flow of `pot` on `grid`. Trajectories must stay
/// in the box enlarged threefold about its center.
pub fn contact_flow_map(
    pot: Potential,
    time: f64,
    rk_steps: usize,
    grid: Grid,
    kind: FlowKind,
) -> Result<SampledMap> {
    if !time.is_finite() {
        return Err(invalid("time", "must be finite"));
    }
    if rk_steps == 0 {
        return Err(invalid("rk_steps", "need at least one step"));
    }
    let bounds = grid.enlarged(3.0);
    match kind {
        FlowKind::Analytic => Ok(SampledMap::analytic_fallible(grid, move |p| {
            flow_point(&pot, p, time, rk_steps, &bounds)
        })),
        FlowKind::Tabulated => {
            let values = grid
                .nodes()
                .into_par_iter()
                .map(|p| flow_point(&pot, p, time, rk_steps, &bounds))
                .collect::<Result<Vec<_>>>()?;
            SampledMap::tabulated(grid, values)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{contact_residual, qi_report};

    fn grid(n: usize) -> Grid {
        Grid::cube(1.0, n).unwrap()
    }

    fn close(a: Point, b: Point, tol: f64) -> bool {
        (a.x - b.x).abs() <= tol && (a.y - b.y).abs() <= tol && (a.t - b.t).abs() <= tol
    }

    #[test]
    fn zero_and_constant_potentials() {
        let g = grid(5);
        let id = contact_flow_map(Potential::zero(), 0.7, 10, g, FlowKind::Analytic).unwrap();
        let up = contact_flow_map(Potential::constant(1.0), 0.3, 10, g, FlowKind::Analytic).unwrap();
        for p in g.nodes() {
            assert_eq!(id.eval(p).unwrap(), p);
            assert!(close(up.eval(p).unwrap(), Point::new(p.x, p.y, p.t + 0.3), 1e-14));
        }
    }

    #[test]
    fn linear_potentials_give_known_maps() {
        let g = grid(5);
        let s = 0.4;
        let tr = contact_flow_map(Potential::linear_x(), s, 8, g, FlowKind::Analytic).unwrap();
        let dil = contact_flow_map(
            Potential::new([0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]),
            s,
            64,
            g,
            FlowKind::Analytic,
        )
        .unwrap();
        let r = (0.5 * s).exp();
        for p in g.nodes() {
            let want = Point::new(0.0, 0.25 * s, 0.0) * p;
            assert!(close(tr.eval(p).unwrap(), want, 1e-13));
            let want = Point::new(r * p.x, r * p.y, r * r * p.t);
            assert!(close(dil.eval(p).unwrap(), want, 1e-9));
        }
    }

    #[test]
    fn flows_are_contact_and_near_isometric_for_short_times() {
        let g = grid(7);
        let nodes = g.nodes();
        let mut prev = f64::INFINITY;
        for s in [0.2, 0.1, 0.05] {
            let f = contact_flow_map(Potential::wave(), s, 16, g, FlowKind::Analytic).unwrap();
            let rep = qi_report(&f, &nodes).unwrap();
            assert!(rep.contact_residual_sup < 1e-7, "{}", rep.contact_residual_sup);
            assert!(rep.l_est - 1.0 < prev);
            prev = rep.l_est - 1.0;
        }
        assert!(prev < 0.05);
    }

    #[test]
    fn tabulated_contact_residual_is_second_order() {
        let pot = Potential::new([0.0, 0.0, 0.0, 0.0, 0.3, 0.0, -0.2, 1.0]);
        let coarse = grid(9);
        let fine = coarse.refined();
        let sup = |g: Grid| {
            let f = contact_flow_map(pot, 0.3, 32, g, FlowKind::Tabulated).unwrap();
            let probe: Vec<Point> = coarse
                .nodes()
                .into_iter()
                .filter(|p| p.x.abs() <= 0.5 && p.y.abs() <= 0.5 && p.t.abs() <= 0.5)
                .collect();
            contact_residual(&f, &probe)
                .unwrap()
                .into_iter()
                .map(|[a, b]| a.abs().max(b.abs()))
                .fold(0.0, f64::max)
        };
        let (rc, rf) = (sup(coarse), sup(fine));
        assert!(rc / rf >= 3.0, "coarse {rc}, fine {rf}");
    }

    #[test]
    fn escaping_trajectories_are_reported() {
        let g = grid(3);
        let f = contact_flow_map(Potential::constant(1.0), 100.0, 10, g, FlowKind::Analytic).unwrap();
        assert!(matches!(f.eval(Point::IDENTITY), Err(Error::FlowEscaped { .. })));
    }
}
