use super::Grid;
use crate::error::{invalid, Result};
use crate::group::{dilate_unchecked, Ball, Point};

/// Midpoint rule: equal-volume cells represented by their centers.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub points: Vec<Point>,
    pub cell_volume: f64,
}

impl Quadrature {
    /// Cells centered at the nodes of `grid` whose centers lie in `ball`.
    pub fn on_grid(grid: &Grid, ball: &Ball) -> Result<Self> {
        let h = grid.spacing();
        let mut points = Vec::new();
        for p in grid.nodes() {
            if ball.contains(p)? {
                points.push(p);
            }
        }
        Self::checked(points, h[0] * h[1] * h[2])
    }

    /// `n³` cells tiling the bounding box of `ball`, kept when the center is
    /// in the ball. Cells are laid out at the unit ball and carried over by
    /// `c·δ_r`, which multiplies volumes by `r⁴`.
    pub fn ball(ball: &Ball, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "need at least one cell per axis"));
        }
        let unit = Ball {
            center: Point::IDENTITY,
            radius: 1.0,
            metric: ball.metric,
        };
        let ext = unit.unit_extent();
        let h = ext.map(|e| 2.0 * e / n as f64);
        let mut points = Vec::new();
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    let u = Point::new(
                        -ext[0] + (i as f64 + 0.5) * h[0],
                        -ext[1] + (j as f64 + 0.5) * h[1],
                        -ext[2] + (k as f64 + 0.5) * h[2],
                    );
                    if unit.contains(u)? {
                        points.push(ball.center * dilate_unchecked(ball.radius, u));
                    }
                }
            }
        }
        Self::checked(points, h[0] * h[1] * h[2] * ball.radius.powi(4))
    }

    /// `n³` cells tiling a box, all kept.
    pub fn boxed(lo: [f64; 3], hi: [f64; 3], n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "need at least one cell per axis"));
        }
        let h: [f64; 3] = std::array::from_fn(|a| (hi[a] - lo[a]) / n as f64);
        if h.iter().any(|&v| !(v > 0.0)) {
            return Err(invalid("box", "empty box"));
        }
        let mut points = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    points.push(Point::new(
                        lo[0] + (i as f64 + 0.5) * h[0],
                        lo[1] + (j as f64 + 0.5) * h[1],
                        lo[2] + (k as f64 + 0.5) * h[2],
                    ));
                }
            }
        }
        Self::checked(points, h[0] * h[1] * h[2])
    }

    /// The cells of `self` whose centers lie in `ball`.
    pub fn restrict(&self, ball: &Ball) -> Result<Self> {
        let mut points = Vec::new();
        for &p in &self.points {
            if ball.contains(p)? {
                points.push(p);
            }
        }
        Self::checked(points, self.cell_volume)
    }

    fn checked(points: Vec<Point>, cell_volume: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("ball", "no quadrature cell center inside the region"));
        }
        Ok(Self { points, cell_volume })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn volume(&self) -> f64 {
        self.points.len() as f64 * self.cell_volume
    }

    /// `Σ vᵢ · cell volume`.
    pub fn integral(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() * self.cell_volume
    }

    /// `(Σ |vᵢ|^p · cell volume)^{1/p}`.
    pub fn lp_norm(&self, values: &[f64], p: f64) -> f64 {
        if p.is_infinite() {
            return sup_norm(values);
        }
        let s: f64 = values.iter().map(|v| v.abs().powf(p)).sum();
        (s * self.cell_volume).powf(1.0 / p)
    }
}

/// `max |vᵢ|`.
pub fn sup_norm(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SampledMap;

    #[test]
    fn constant_field_norm() {
        let q = Quadrature::ball(&Ball::unit(), 12).unwrap();
        let c = 2.5;
        let v = vec![c; q.len()];
        for p in [1.0, 2.0, 4.0] {
            let want = c * (q.len() as f64 * q.cell_volume).powf(1.0 / p);
            assert!((q.lp_norm(&v, p) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn volumes_scale_homogeneously_and_converge() {
        let unit = Quadrature::ball(&Ball::unit(), 32).unwrap().volume();
        let moved = Ball::cc(Point::new(0.5, -0.3, 1.0), 2.0).unwrap();
        let big = Quadrature::ball(&moved, 32).unwrap().volume();
        assert!((big / unit - 16.0).abs() < 1e-9);
        let coarse = Quadrature::ball(&Ball::unit(), 16).unwrap().volume();
        assert!((coarse - unit).abs() / unit < 0.05);
    }

    #[test]
    fn smooth_field_norm_is_stable_under_refinement() {
        let norm = |n| {
            let q = Quadrature::ball(&Ball::unit(), n).unwrap();
            let v: Vec<f64> = q.points.iter().map(|p| (p.x * p.x + p.t).cos()).collect();
            q.lp_norm(&v, 2.0)
        };
        let (a, b) = (norm(16), norm(32));
        assert!((a - b).abs() / b < 0.05);
    }

    #[test]
    fn dilation_deviation_sup() {
        let eps = 0.02;
        let g = Grid::cube(1.0, 3).unwrap();
        let f = SampledMap::dilation(g, 1.0 + eps).unwrap();
        let q = Quadrature::ball(&Ball::unit(), 16).unwrap();
        let dev: Vec<f64> = q
            .points
            .iter()
            .map(|&p| {
                let v = f.eval(p).unwrap();
                (v.x - p.x).hypot(v.y - p.y)
            })
            .collect();
        let s = sup_norm(&dev);
        assert!(s <= eps && s > 0.8 * eps);
    }

    #[test]
    fn empty_region_is_rejected() {
        let g = Grid::cube(1.0, 3).unwrap();
        let far = Ball::cc(Point::new(10.0, 0.0, 0.0), 0.1).unwrap();
        assert!(Quadrature::on_grid(&g, &far).is_err());
    }
}
