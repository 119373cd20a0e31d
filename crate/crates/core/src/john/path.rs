use std::f64::consts::{PI, TAU};

use crate::cc::{cc_dist, geodesic_point};
use crate::error::{Error, Result};
use crate::group::{dilate, Point};
use crate::sampling::unit_cc_sphere_point;

/// Target slope of `d_U(γ(s)) / s` for accepting a direct geodesic.
const CONE: f64 = 0.05;
/// Length of an ascent piece, relative to the current boundary distance.
const ASCENT: f64 = 0.5;
const MAX_PIECES: usize = 2000;

/// A John curve: CC geodesic pieces between consecutive vertices, from `x`
/// to `x_*`.
#[derive(Debug, Clone, PartialEq)]
pub struct JohnPath {
    vertices: Vec<Point>,
    /// Arclength from `x` to each vertex.
    cumulative: Vec<f64>,
}

impl JohnPath {
    pub fn geodesic(x: Point, x_star: Point) -> Result<Self> {
        Ok(Self {
            vertices: vec![x, x_star],
            cumulative: vec![0.0, cc_dist(x, x_star)?],
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().expect("nonempty path")
    }

    /// Point at arclength `s` from `x`, clamped to the curve.
    pub fn point_at(&self, s: f64) -> Result<Point> {
        let s = s.clamp(0.0, self.length());
        let i = self.cumulative.partition_point(|&c| c <= s).clamp(1, self.vertices.len() - 1);
        let (a, b) = (self.cumulative[i - 1], self.cumulative[i]);
        if b <= a {
            return Ok(self.vertices[i]);
        }
        geodesic_point(self.vertices[i - 1], self.vertices[i], (s - a) / (b - a))
    }

    /// `min d_U(γ(s)) / s` over sampled arclengths.
    pub fn cone_slope<D>(&self, dist: &D) -> Result<f64>
    where
        D: Fn(Point) -> Result<f64>,
    {
        let mut worst = f64::INFINITY;
        for i in 1..self.vertices.len() {
            let (p, q) = (self.vertices[i - 1], self.vertices[i]);
            let (s0, len) = (self.cumulative[i - 1], self.cumulative[i] - self.cumulative[i - 1]);
            for f in fractions() {
                let s = s0 + f * len;
                if s > 0.0 {
                    worst = worst.min(dist(geodesic_point(p, q, f)?)? / s);
                }
            }
        }
        Ok(worst)
    }
}

fn fractions() -> impl Iterator<Item = f64> {
    (1..=32).map(|j| j as f64 / 32.0).chain((6..=30).map(|k| 0.5f64.powi(k)))
}

fn directions() -> Vec<Point> {
    let mut out = Vec::new();
    for i in 0..=6 {
        for j in 0..8 {
            for upper in [true, false] {
                out.push(unit_cc_sphere_point(i as f64 * PI / 6.0, j as f64 * TAU / 8.0, upper));
            }
        }
    }
    out
}

/// Greedy John curve: from the current vertex, take the geodesic to `x_*`
/// when it keeps `d_U ≥ CONE · s`; otherwise step `ASCENT · d_U` in the
/// sampled direction that maximizes `d_U` and repeat.
pub fn ascent_path<D>(x: Point, x_star: Point, dist: &D) -> Result<JohnPath>
where
    D: Fn(Point) -> Result<f64>,
{
    let dirs = directions();
    let mut vertices = vec![x];
    let mut cumulative = vec![0.0];
    loop {
        let p = *vertices.last().expect("nonempty");
        let s0 = *cumulative.last().expect("nonempty");
        let l = cc_dist(p, x_star)?;
        let mut direct = true;
        for f in fractions() {
            if dist(geodesic_point(p, x_star, f)?)? < CONE * (s0 + f * l) {
                direct = false;
                break;
            }
        }
        if direct {
            vertices.push(x_star);
            cumulative.push(s0 + l);
            return Ok(JohnPath { vertices, cumulative });
        }
        let d = dist(p)?;
        if !(d > 0.0) || vertices.len() > MAX_PIECES {
            return Err(Error::Degenerate(format!("no John curve from {x:?}")));
        }
        let r = ASCENT * d;
        let mut best = (d, p, r);
        for &u in &dirs {
            let q = p * dilate(r, u)?;
            let v = dist(q)?;
            if v > best.0 {
                best = (v, q, r);
            }
        }
        if best.0 <= d {
            return Err(Error::Degenerate(format!("boundary distance has no ascent at {p:?}")));
        }
        vertices.push(best.1);
        cumulative.push(s0 + best.2);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_at_walks_the_pieces() {
        let a = Point::new(0.0, 0.0, 0.0);
        let b = Point::new(1.0, 0.0, 0.0);
        let c = Point::new(1.0, 1.0, 2.0);
        let path = JohnPath {
            vertices: vec![a, b, c],
            cumulative: vec![0.0, 1.0, 2.0],
        };
        assert_eq!(path.length(), 2.0);
        let m = path.point_at(0.5).unwrap();
        assert!((m.x - 0.5).abs() < 1e-12 && m.y.abs() < 1e-12);
        let e = path.point_at(5.0).unwrap();
        assert!((e.x - 1.0).abs() < 1e-12 && (e.y - 1.0).abs() < 1e-12);
    }
}
