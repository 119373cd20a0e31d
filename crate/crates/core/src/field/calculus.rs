use nalgebra::Matrix2;
use rayon::prelude::*;

use super::SampledMap;
use crate::error::{Error, Result};
use crate::group::Point;
use crate::isometry::singular_values;

/// Time-`s` flow of `X = ∂x + 2y∂t`.
pub fn x_flow(p: Point, s: f64) -> Point {
    Point::new(p.x + s, p.y, p.t + 2.0 * p.y * s)
}

/// Time-`s` flow of `Y = ∂y - 2x∂t`.
pub fn y_flow(p: Point, s: f64) -> Point {
    Point::new(p.x, p.y + s, p.t - 2.0 * p.x * s)
}

/// A left-invariant horizontal direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    X,
    Y,
}

impl Direction {
    pub fn flow(self, p: Point, s: f64) -> Point {
        match self {
            Direction::X => x_flow(p, s),
            Direction::Y => y_flow(p, s),
        }
    }
}

/// Central difference of `F` along the exact flow line of `dir` through `p`.
pub fn horizontal_derivative_at(f: &SampledMap, dir: Direction, step: f64, p: Point) -> Result<[f64; 3]> {
    let eval = |q: Point| {
        f.eval(q).map_err(|e| match e {
            Error::OutsideBox { .. } => Error::Stencil { point: p },
            other => other,
        })
    };
    let fwd = eval(dir.flow(p, step))?;
    let bwd = eval(dir.flow(p, -step))?;
    let w = 0.5 / step;
    Ok([(fwd.x - bwd.x) * w, (fwd.y - bwd.y) * w, (fwd.t - bwd.t) * w])
}

/// [`horizontal_derivative_at`] at every point of `points`.
pub fn horizontal_derivative(
    f: &SampledMap,
    dir: Direction,
    step: f64,
    points: &[Point],
) -> Result<Vec<[f64; 3]>> {
    points
        .par_iter()
        .map(|&p| horizontal_derivative_at(f, dir, step, p))
        .collect()
}

fn both_derivatives(f: &SampledMap, p: Point) -> Result<([f64; 3], [f64; 3])> {
    let [sx, sy] = f.default_step();
    Ok((
        horizontal_derivative_at(f, Direction::X, sx, p)?,
        horizontal_derivative_at(f, Direction::Y, sy, p)?,
    ))
}

/// Horizontal differential `[[Xf₁, Yf₁], [Xf₂, Yf₂]]` at `p`.
pub fn dh_at(f: &SampledMap, p: Point) -> Result<Matrix2<f64>> {
    let (dx, dy) = both_derivatives(f, p)?;
    Ok(Matrix2::new(dx[0], dy[0], dx[1], dy[1]))
}

/// Per-point horizontal differentials.
#[derive(Debug, Clone, PartialEq)]
pub struct HField {
    pub points: Vec<Point>,
    pub mats: Vec<Matrix2<f64>>,
}

impl HField {
    /// A field given by a closed-form rule.
    pub fn from_fn(points: Vec<Point>, f: impl Fn(Point) -> Matrix2<f64>) -> Self {
        let mats = points.iter().map(|&p| f(p)).collect();
        Self { points, mats }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn dh(f: &SampledMap, points: &[Point]) -> Result<HField> {
    let mats = points.par_iter().map(|&p| dh_at(f, p)).collect::<Result<Vec<_>>>()?;
    Ok(HField {
        points: points.to_vec(),
        mats,
    })
}

/// `(Xf₃ - 2f₂Xf₁ + 2f₁Xf₂, Yf₃ - 2f₂Yf₁ + 2f₁Yf₂)` at every point.
pub fn contact_residual(f: &SampledMap, points: &[Point]) -> Result<Vec<[f64; 2]>> {
    points
        .par_iter()
        .map(|&p| {
            let v = f.eval(p)?;
            let (dx, dy) = both_derivatives(f, p)?;
            let r = |d: [f64; 3]| d[2] - 2.0 * v.y * d[0] + 2.0 * v.x * d[1];
            Ok([r(dx), r(dy)])
        })
        .collect()
}

/// Sign pattern of `det D_hF` over the tested points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Preserving,
    Reversing,
    Mixed,
}

impl Orientation {
    /// `+1`, `-1`, or `None` for a mixed pattern.
    pub fn sign(self) -> Option<i8> {
        match self {
            Orientation::Preserving => Some(1),
            Orientation::Reversing => Some(-1),
            Orientation::Mixed => None,
        }
    }
}

/// Discrete quasi-isometry constants of a sampled map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QIReport {
    /// `max(σ_max, 1/σ_min)` of `D_hF`, at least 1.
    pub l_est: f64,
    pub orientation: Orientation,
    pub contact_residual_sup: f64,
}

/// Distortion and orientation of a differential field.
pub fn qi_from_field(field: &HField) -> Result<(f64, Orientation)> {
    let mut l: f64 = 1.0;
    let (mut pos, mut neg) = (false, false);
    for (p, m) in field.points.iter().zip(&field.mats) {
        let (smax, smin) = singular_values(m);
        let det = m.determinant();
        if smin == 0.0 || det == 0.0 {
            return Err(Error::SingularDifferential { point: *p });
        }
        l = l.max(smax).max(1.0 / smin);
        if det > 0.0 {
            pos = true;
        } else {
            neg = true;
        }
    }
    let orientation = match (pos, neg) {
        (true, false) => Orientation::Preserving,
        (false, true) => Orientation::Reversing,
        _ => Orientation::Mixed,
    };
    Ok((l, orientation))
}

pub fn qi_report(f: &SampledMap, points: &[Point]) -> Result<QIReport> {
    let field = dh(f, points)?;
    let (l_est, orientation) = qi_from_field(&field)?;
    let contact_residual_sup = contact_residual(f, points)?
        .into_iter()
        .map(|[a, b]| a.abs().max(b.abs()))
        .fold(0.0, f64::max);
    Ok(QIReport {
        l_est,
        orientation,
        contact_residual_sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;
    use crate::isometry::{op_norm, Isometry};

    fn grid() -> Grid {
        Grid::cube(1.0, 5).unwrap()
    }

    #[test]
    fn flow_examples() {
        assert_eq!(x_flow(Point::new(0.0, 1.0, 0.0), 1.0), Point::new(1.0, 1.0, 2.0));
        assert_eq!(y_flow(Point::new(1.0, 0.0, 0.0), 1.0), Point::new(1.0, 1.0, -2.0));
        let p = Point::new(0.3, -1.2, 0.7);
        let back = x_flow(x_flow(p, 0.25), -0.25);
        assert!((back.t - p.t).abs() < 1e-15 && (back.x - p.x).abs() < 1e-15);
    }

    #[test]
    fn derivative_examples() {
        let id = SampledMap::identity(grid());
        let nodes = grid().nodes();
        for d in horizontal_derivative(&id, Direction::X, 1e-3, &nodes).unwrap() {
            assert!((d[0] - 1.0).abs() < 1e-12 && d[1].abs() < 1e-12);
        }
        let sq = SampledMap::analytic(grid(), |p| Point::new(p.x * p.x, p.y, p.t));
        let d = horizontal_derivative_at(&sq, Direction::X, 0.1, Point::new(3.0, 0.5, 0.0)).unwrap();
        assert!((d[0] - 6.0).abs() < 1e-13);
        let dil = SampledMap::dilation(grid(), 2.0).unwrap();
        for m in dh(&dil, &nodes).unwrap().mats {
            assert!((m - Matrix2::<f64>::identity() * 2.0).norm() < 1e-10);
        }
    }

    #[test]
    fn differential_of_isometries_is_constant() {
        let iso = Isometry::new(true, 0.8, Point::new(0.5, -0.25, 1.0));
        let f = SampledMap::isometry(grid(), iso);
        for m in dh(&f, &grid().nodes()).unwrap().mats {
            assert!((m - iso.horizontal_matrix()).norm() < 1e-9);
        }
    }

    #[test]
    fn contact_residual_examples() {
        let nodes = grid().nodes();
        for f in [
            SampledMap::identity(grid()),
            SampledMap::dilation(grid(), 1.7).unwrap(),
            SampledMap::isometry(grid(), Isometry::new(false, 2.0, Point::new(1.0, 2.0, 3.0))),
        ] {
            for r in contact_residual(&f, &nodes).unwrap() {
                assert!(r[0].abs() < 1e-9 && r[1].abs() < 1e-9, "{r:?}");
            }
        }
        let bent = SampledMap::analytic(grid(), |p| Point::new(p.x, p.y, p.t + p.x));
        for r in contact_residual(&bent, &nodes).unwrap() {
            assert!((r[0] - 1.0).abs() < 1e-9 && r[1].abs() < 1e-9);
        }
    }

    #[test]
    fn qi_report_examples() {
        let nodes = grid().nodes();
        let eps = 0.05;
        let rot = SampledMap::isometry(grid(), Isometry::rotation(1.0));
        let r = qi_report(&rot, &nodes).unwrap();
        assert!((r.l_est - 1.0).abs() < 1e-9);
        assert_eq!(r.orientation, Orientation::Preserving);
        let refl = SampledMap::isometry(grid(), Isometry::reflection());
        assert_eq!(qi_report(&refl, &nodes).unwrap().orientation, Orientation::Reversing);
        let dil = SampledMap::dilation(grid(), 1.0 + eps).unwrap();
        let r = qi_report(&dil, &nodes).unwrap();
        assert!((r.l_est - 1.0 - eps).abs() < 1e-9);
        assert_eq!(r.orientation, Orientation::Preserving);
        let flipped = dil.then_isometry(Isometry::reflection());
        let r = qi_report(&flipped, &nodes).unwrap();
        assert!((r.l_est - 1.0 - eps).abs() < 1e-9);
        assert_eq!(r.orientation, Orientation::Reversing);
        let flat = SampledMap::analytic(grid(), |p| Point::new(p.x, 0.0, 0.0));
        assert!(matches!(
            qi_report(&flat, &nodes),
            Err(Error::SingularDifferential { .. })
        ));
    }

    #[test]
    fn tabulated_stencil_failure_is_reported() {
        let tab = SampledMap::identity(grid()).tabulate().unwrap();
        let edge = Point::new(1.0, 0.0, 0.0);
        assert!(matches!(dh_at(&tab, edge), Err(Error::Stencil { .. })));
        let m = dh_at(&tab, Point::new(0.0, 0.5, 0.0)).unwrap();
        assert!(op_norm(&(m - Matrix2::identity())) < 1e-12);
    }
}
