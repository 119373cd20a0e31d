//! Mappings `F: U → H¹` sampled on a grid, and discrete horizontal calculus.
//!
//! A [`SampledMap`] is either an analytic rule that can be evaluated
//! anywhere, a table of values on a [`Grid`] read back by trilinear
//! interpolation, or one of those post-composed with a pointwise map.

mod calculus;
mod flow;
mod io;
mod quadrature;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::group::{dilate, Point};
use crate::isometry::Isometry;

pub use calculus::{
    contact_residual, dh, dh_at, horizontal_derivative, horizontal_derivative_at, qi_from_field,
    qi_report, x_flow, y_flow, Direction, HField, Orientation, QIReport,
};
pub use flow::{contact_flow_map, contact_velocity, flow_point, FlowKind, Potential};
pub use io::{read_map, write_map};
pub use quadrature::{sup_norm, Quadrature};

/// Axis-aligned box with a regular lattice of nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    /// Nodes per axis, endpoints included.
    pub n: [usize; 3],
}

impl Grid {
    pub fn new(lo: [f64; 3], hi: [f64; 3], n: [usize; 3]) -> Result<Self> {
        for a in 0..3 {
            if !(lo[a].is_finite() && hi[a].is_finite() && hi[a] > lo[a]) {
                return Err(invalid("box", format!("empty range on axis {a}: [{}, {}]", lo[a], hi[a])));
            }
            if n[a] < 2 {
                return Err(invalid("n", format!("need at least 2 nodes on axis {a}")));
            }
        }
        Ok(Self { lo, hi, n })
    }

    /// `[-half, half]³` with `n` nodes per axis.
    pub fn cube(half: f64, n: usize) -> Result<Self> {
        Self::new([-half; 3], [half; 3], [n; 3])
    }

    pub fn spacing(&self) -> [f64; 3] {
        std::array::from_fn(|a| (self.hi[a] - self.lo[a]) / (self.n[a] - 1) as f64)
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Linear index with `x` varying fastest.
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n[0] * (j + self.n[1] * k)
    }

    pub fn node(&self, i: usize, j: usize, k: usize) -> Point {
        let h = self.spacing();
        Point::new(
            self.lo[0] + i as f64 * h[0],
            self.lo[1] + j as f64 * h[1],
            self.lo[2] + k as f64 * h[2],
        )
    }

    pub fn node_at(&self, idx: usize) -> Point {
        let i = idx % self.n[0];
        let j = (idx / self.n[0]) % self.n[1];
        let k = idx / (self.n[0] * self.n[1]);
        self.node(i, j, k)
    }

    /// All nodes in index order.
    pub fn nodes(&self) -> Vec<Point> {
        (0..self.len()).map(|idx| self.node_at(idx)).collect()
    }

    pub fn contains(&self, p: Point) -> bool {
        let c = p.to_array();
        (0..3).all(|a| c[a] >= self.lo[a] && c[a] <= self.hi[a])
    }

    /// Euclidean diameter of the box.
    pub fn diameter(&self) -> f64 {
        (0..3)
            .map(|a| (self.hi[a] - self.lo[a]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Same box with halved spacing; every node of `self` is a node of the result.
    pub fn refined(&self) -> Grid {
        Grid {
            lo: self.lo,
            hi: self.hi,
            n: self.n.map(|m| 2 * m - 1),
        }
    }

    /// Same box scaled about its center by `factor`.
    pub fn enlarged(&self, factor: f64) -> Grid {
        let mut g = *self;
        for a in 0..3 {
            let mid = 0.5 * (self.lo[a] + self.hi[a]);
            let half = 0.5 * (self.hi[a] - self.lo[a]) * factor;
            g.lo[a] = mid - half;
            g.hi[a] = mid + half;
        }
        g
    }

    /// Trilinear interpolation of per-node values.
    fn interpolate(&self, values: &[Point], p: Point) -> Result<Point> {
        let h = self.spacing();
        let c = p.to_array();
        let mut cell = [0usize; 3];
        let mut frac = [0.0; 3];
        for a in 0..3 {
            let s = (c[a] - self.lo[a]) / h[a];
            let top = (self.n[a] - 1) as f64;
            if !(s >= -1e-9 && s <= top + 1e-9) {
                return Err(Error::OutsideBox { point: p });
            }
            let mut s = s.clamp(0.0, top);
            if (s - s.round()).abs() < 1e-9 {
                s = s.round();
            }
            let i = (s.floor() as usize).min(self.n[a] - 2);
            cell[a] = i;
            frac[a] = s - i as f64;
        }
        let mut acc = [0.0; 3];
        for corner in 0..8 {
            let di = corner & 1;
            let dj = (corner >> 1) & 1;
            let dk = (corner >> 2) & 1;
            let w = (if di == 1 { frac[0] } else { 1.0 - frac[0] })
                * (if dj == 1 { frac[1] } else { 1.0 - frac[1] })
                * (if dk == 1 { frac[2] } else { 1.0 - frac[2] });
            if w == 0.0 {
                continue;
            }
            let v = values[self.index(cell[0] + di, cell[1] + dj, cell[2] + dk)];
            acc[0] += w * v.x;
            acc[1] += w * v.y;
            acc[2] += w * v.t;
        }
        Ok(Point::from_array(acc))
    }
}

type Rule = Arc<dyn Fn(Point) -> Result<Point> + Send + Sync>;

#[derive(Clone)]
enum Source {
    Analytic(Rule),
    Tabulated(Arc<Vec<Point>>),
    Composed { inner: Arc<SampledMap>, post: Rule },
}

/// A mapping of a box of H¹ into H¹.
#[derive(Clone)]
pub struct SampledMap {
    source: Source,
    grid: Grid,
}

impl fmt::Debug for SampledMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.source {
            Source::Analytic(_) => "analytic",
            Source::Tabulated(_) => "tabulated",
            Source::Composed { .. } => "composed",
        };
        f.debug_struct("SampledMap")
            .field("source", &kind)
            .field("grid", &self.grid)
            .finish()
    }
}

impl SampledMap {
    /// Closed-form map, exact at every point.
    pub fn analytic<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(Point) -> Point + Send + Sync + 'static,
    {
        Self::analytic_fallible(grid, move |p| Ok(f(p)))
    }

    pub fn analytic_fallible<F>(grid: Grid, f: F) -> Self
    where
        F: Fn(Point) -> Result<Point> + Send + Sync + 'static,
    {
        Self {
            source: Source::Analytic(Arc::new(f)),
            grid,
        }
    }

    pub fn identity(grid: Grid) -> Self {
        Self::analytic(grid, |p| p)
    }

    /// The dilation `δ_r`.
    pub fn dilation(grid: Grid, r: f64) -> Result<Self> {
        dilate(r, Point::IDENTITY)?;
        Ok(Self::analytic(grid, move |p| {
            Point::new(r * p.x, r * p.y, r * r * p.t)
        }))
    }

    pub fn isometry(grid: Grid, iso: Isometry) -> Self {
        Self::analytic(grid, move |p| iso.apply(p))
    }

    /// Values at the nodes of `grid`, in index order.
    pub fn tabulated(grid: Grid, values: Vec<Point>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(
                "values",
                format!("expected {} nodes, got {}", grid.len(), values.len()),
            ));
        }
        if let Some(p) = values.iter().find(|p| !p.is_finite()) {
            return Err(Error::Degenerate(format!("non-finite tabulated value {p:?}")));
        }
        Ok(Self {
            source: Source::Tabulated(Arc::new(values)),
            grid,
        })
    }

    /// Tabulates this map on its own grid.
    pub fn tabulate(&self) -> Result<Self> {
        Self::tabulated(self.grid, self.values()?)
    }

    /// Tabulates this map on another grid.
    pub fn tabulate_on(&self, grid: Grid) -> Result<Self> {
        let values = grid.nodes().into_iter().map(|p| self.eval(p)).collect::<Result<_>>()?;
        Self::tabulated(grid, values)
    }

    /// `post ∘ self`.
    pub fn then<F>(&self, post: F) -> Self
    where
        F: Fn(Point) -> Point + Send + Sync + 'static,
    {
        Self {
            source: Source::Composed {
                inner: Arc::new(self.clone()),
                post: Arc::new(move |p| Ok(post(p))),
            },
            grid: self.grid,
        }
    }

    /// `iso ∘ self`.
    pub fn then_isometry(&self, iso: Isometry) -> Self {
        self.then(move |p| iso.apply(p))
    }

    pub fn eval(&self, p: Point) -> Result<Point> {
        match &self.source {
            Source::Analytic(rule) => rule(p),
            Source::Tabulated(values) => self.grid.interpolate(values, p),
            Source::Composed { inner, post } => post(inner.eval(p)?),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Whether evaluation goes through interpolation of a table.
    pub fn is_tabulated(&self) -> bool {
        match &self.source {
            Source::Analytic(_) => false,
            Source::Tabulated(_) => true,
            Source::Composed { inner, .. } => inner.is_tabulated(),
        }
    }

    fn base_grid(&self) -> Grid {
        match &self.source {
            Source::Composed { inner, .. } => inner.base_grid(),
            _ => self.grid,
        }
    }

    /// Values at the grid nodes.
    pub fn values(&self) -> Result<Vec<Point>> {
        self.grid.nodes().into_iter().map(|p| self.eval(p)).collect()
    }

    /// Flow parameters used for the `X` and `Y` central differences.
    pub fn default_step(&self) -> [f64; 2] {
        if self.is_tabulated() {
            let h = self.base_grid().spacing();
            [h[0], h[1]]
        } else {
            let s = 1e-4 * self.grid.diameter();
            [s, s]
        }
    }

    /// Nodes at which both horizontal stencils stay inside the table.
    /// For analytic maps this is every node.
    pub fn stencil_nodes(&self) -> Vec<Point> {
        if !self.is_tabulated() {
            return self.grid.nodes();
        }
        let base = self.base_grid();
        let [sx, sy] = self.default_step();
        self.grid
            .nodes()
            .into_iter()
            .filter(|&p| {
                [-1.0, 1.0].iter().all(|&sg| {
                    base.contains(x_flow(p, sg * sx)) && base.contains(y_flow(p, sg * sy))
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts_and_alignment() {
        let g = Grid::new([-1.0, 0.0, -2.0], [1.0, 1.0, 2.0], [5, 3, 9]).unwrap();
        assert_eq!(g.len(), 135);
        assert_eq!(g.nodes().len(), 135);
        assert_eq!(g.node_at(g.index(4, 2, 8)), Point::new(1.0, 1.0, 2.0));
        let r = g.refined();
        for k in 0..9 {
            for i in 0..5 {
                assert_eq!(g.node(i, 1, k), r.node(2 * i, 2, 2 * k));
            }
        }
        assert!(Grid::new([0.0; 3], [0.0, 1.0, 1.0], [3; 3]).is_err());
        assert!(Grid::cube(1.0, 1).is_err());
    }

    #[test]
    fn tabulation_reproduces_nodes_and_linear_maps() {
        let g = Grid::cube(1.0, 7).unwrap();
        let lin = SampledMap::analytic(g, |p| Point::new(2.0 * p.x - p.t, p.y + 0.5, 3.0 * p.t + p.x));
        let tab = lin.tabulate().unwrap();
        for p in g.nodes() {
            assert_eq!(tab.eval(p).unwrap(), lin.eval(p).unwrap());
        }
        let q = Point::new(0.123, -0.77, 0.31);
        let (a, b) = (tab.eval(q).unwrap(), lin.eval(q).unwrap());
        assert!((a.x - b.x).abs() < 1e-14 && (a.y - b.y).abs() < 1e-14 && (a.t - b.t).abs() < 1e-14);
        assert!(matches!(tab.eval(Point::new(1.5, 0.0, 0.0)), Err(Error::OutsideBox { .. })));
    }

    #[test]
    fn stencil_nodes_respect_the_box() {
        let g = Grid::cube(1.0, 9).unwrap();
        let tab = SampledMap::identity(g).tabulate().unwrap();
        let inner = tab.stencil_nodes();
        assert!(!inner.is_empty() && inner.len() < g.len());
        assert!(inner.iter().all(|p| p.x.abs() < 1.0 && p.y.abs() < 1.0));
        assert_eq!(SampledMap::identity(g).stencil_nodes().len(), g.len());
    }
}
