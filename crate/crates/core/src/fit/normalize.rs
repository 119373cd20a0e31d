use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SampledMap;
use crate::group::Point;
use crate::isometry::Isometry;

/// The post-composition `R_A ∘ π_a` taking `F` to `F_N`. The rotation is
/// applied as `z w̄ / |w|` so that the anchor conditions hold exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalizer {
    /// `a = F(0)⁻¹`.
    pub a: Point,
    /// Horizontal part of `π_a(F(1,0,0))`.
    pub w: Complex64,
}

impl Normalizer {
    /// `e^{iA}` with `A = -arg w`.
    pub fn rot(&self) -> Complex64 {
        self.w.conj() / self.w.norm()
    }

    pub fn apply(&self, p: Point) -> Point {
        let q = self.a * p;
        if self.w.im == 0.0 && self.w.re > 0.0 {
            return q;
        }
        let z = q.z() * self.w.conj() / self.w.norm();
        Point::new(z.re, z.im, q.t)
    }

    /// The same map as a canonical isometry.
    pub fn isometry(&self) -> Isometry {
        Isometry::rotation(self.rot().arg()).compose(&Isometry::translation(self.a))
    }
}

/// Computes the normalizer of `F` from its values at `0` and `(1,0,0)`.
pub fn normalizer(f: &SampledMap) -> Result<Normalizer> {
    let a = f.eval(Point::IDENTITY)?.inv();
    let w = (a * f.eval(Point::new(1.0, 0.0, 0.0))?).z();
    let m = w.norm();
    if m == 0.0 || !m.is_finite() {
        return Err(Error::Degenerate(
            "F(0) and F(1,0,0) have the same horizontal projection".into(),
        ));
    }
    Ok(Normalizer { a, w })
}

/// `F_N = R_A ∘ π_a ∘ F`: fixes the origin and sends `(1,0,0)` to a point
/// with real nonnegative horizontal coordinate.
pub fn normalize(f: &SampledMap) -> Result<SampledMap> {
    let n = normalizer(f)?;
    Ok(f.then(move |p| n.apply(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid() -> Grid {
        Grid::cube(2.0, 3).unwrap()
    }

    #[test]
    fn normalization_examples() {
        let probes = [Point::new(0.3, -0.2, 0.5), Point::new(-1.0, 0.5, 0.1)];
        let id = normalize(&SampledMap::identity(grid())).unwrap();
        for p in probes {
            assert_eq!(id.eval(p).unwrap(), p);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let iso = Isometry::rotation(rng.gen_range(0.0..6.0)).compose(&Isometry::translation(a));
            let n = normalize(&SampledMap::isometry(grid(), iso)).unwrap();
            for p in probes {
                let q = n.eval(p).unwrap();
                assert!((q.x - p.x).abs() < 1e-12 && (q.y - p.y).abs() < 1e-12 && (q.t - p.t).abs() < 1e-12);
            }
        }
        let dil = SampledMap::dilation(grid(), 1.05).unwrap();
        let n = normalize(&dil).unwrap();
        for p in probes {
            assert_eq!(n.eval(p).unwrap(), dil.eval(p).unwrap());
        }
    }

    #[test]
    fn anchors_hold_exactly_and_normalize_is_idempotent() {
        let f = SampledMap::analytic(grid(), |p| {
            Point::new(0.3 + 1.1 * p.x - 0.2 * p.y, -0.7 + 0.4 * p.x + p.y, 1.3 + p.t + p.x * p.y)
        });
        let n = normalize(&f).unwrap();
        assert_eq!(n.eval(Point::IDENTITY).unwrap().to_array().map(f64::abs), [0.0; 3]);
        let e = n.eval(Point::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(e.y, 0.0);
        assert!(e.x >= 0.0);
        let nn = normalize(&n).unwrap();
        for p in [Point::new(0.2, 0.9, -0.4), Point::new(1.5, -1.0, 1.0)] {
            assert_eq!(nn.eval(p).unwrap(), n.eval(p).unwrap());
        }
    }

    #[test]
    fn coincident_anchors_are_rejected() {
        let f = SampledMap::analytic(grid(), |p| Point::new(0.0, 0.0, p.t));
        assert!(normalize(&f).is_err());
    }
}
