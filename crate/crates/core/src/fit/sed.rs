use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};

/// A closed disk in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    fn covers(&self, p: Complex64, tol: f64) -> bool {
        (p - self.center).norm() <= self.radius + tol
    }

    fn diametral(a: Complex64, b: Complex64) -> Self {
        Self {
            center: 0.5 * (a + b),
            radius: 0.5 * (a - b).norm(),
        }
    }

    fn through(a: Complex64, b: Complex64, c: Complex64) -> Self {
        let (u, v) = (b - a, c - a);
        let d = 2.0 * (u.re * v.im - u.im * v.re);
        let scale = u.norm_sqr().max(v.norm_sqr());
        if d.abs() <= 1e-14 * scale {
            // Collinear: the farthest pair spans the disk.
            let pairs = [(a, b), (a, c), (b, c)];
            let (p, q) = pairs
                .into_iter()
                .max_by(|x, y| (x.0 - x.1).norm().total_cmp(&(y.0 - y.1).norm()))
                .unwrap();
            return Self::diametral(p, q);
        }
        let (nu, nv) = (u.norm_sqr(), v.norm_sqr());
        let off = Complex64::new((v.im * nu - u.im * nv) / d, (u.re * nv - v.re * nu) / d);
        Self {
            center: a + off,
            radius: off.norm(),
        }
    }
}

/// Welzl's incremental algorithm over points in the given order. The order
/// should be random for expected linear time.
pub(crate) fn sed_in_order(pts: &[Complex64]) -> Disk {
    let scale = pts.iter().fold(0.0f64, |m, p| m.max((p - pts[0]).norm()));
    let tol = 1e-13 * scale.max(f64::MIN_POSITIVE);
    let mut disk = Disk {
        center: pts[0],
        radius: 0.0,
    };
    for i in 1..pts.len() {
        if disk.covers(pts[i], tol) {
            continue;
        }
        disk = Disk {
            center: pts[i],
            radius: 0.0,
        };
        for j in 0..i {
            if disk.covers(pts[j], tol) {
                continue;
            }
            disk = Disk::diametral(pts[i], pts[j]);
            for k in 0..j {
                if !disk.covers(pts[k], tol) {
                    disk = Disk::through(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    // The radius is the attained maximum, so the disk covers every point.
    disk.radius = pts.iter().fold(0.0, |m, p| m.max((p - disk.center).norm()));
    disk
}

/// Fixed pseudo-random permutation used to order inputs.
pub(crate) fn shuffled_indices(n: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(0x5eed));
    idx
}

/// Minimal-radius disk containing every point.
pub fn smallest_enclosing_disk(points: &[Complex64]) -> Result<Disk> {
    if points.is_empty() {
        return Err(invalid("points", "smallest enclosing disk of an empty set"));
    }
    let order: Vec<Complex64> = shuffled_indices(points.len())
        .into_iter()
        .map(|i| points[i])
        .collect();
    Ok(sed_in_order(&order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn c(x: f64, y: f64) -> Complex64 {
        Complex64::new(x, y)
    }

    #[test]
    fn small_cases() {
        let d = smallest_enclosing_disk(&[c(1.0, 2.0)]).unwrap();
        assert_eq!((d.center, d.radius), (c(1.0, 2.0), 0.0));
        let d = smallest_enclosing_disk(&[c(0.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!((d.center - c(1.0, 0.0)).norm() < 1e-15 && (d.radius - 1.0).abs() < 1e-15);
        let h = 3f64.sqrt() / 2.0;
        let d = smallest_enclosing_disk(&[c(0.0, 0.0), c(1.0, 0.0), c(0.5, h)]).unwrap();
        assert!((d.radius - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!(smallest_enclosing_disk(&[]).is_err());
    }

    #[test]
    fn collinear_points() {
        let pts: Vec<_> = (0..10).map(|i| c(i as f64, 2.0 * i as f64)).collect();
        let d = smallest_enclosing_disk(&pts).unwrap();
        assert!((d.radius - 0.5 * (81.0f64 + 324.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn matches_brute_force_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.gen_range(2..30);
            let pts: Vec<_> = (0..n)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let d = smallest_enclosing_disk(&pts).unwrap();
            // Every disk through two or three points that covers the set.
            let mut best = f64::INFINITY;
            for i in 0..n {
                for j in i + 1..n {
                    let cands = std::iter::once(Disk::diametral(pts[i], pts[j]))
                        .chain((j + 1..n).map(|k| Disk::through(pts[i], pts[j], pts[k])));
                    for cand in cands {
                        if pts.iter().all(|&p| cand.covers(p, 1e-12)) {
                            best = best.min(cand.radius);
                        }
                    }
                }
            }
            assert!((d.radius - best).abs() < 1e-10, "{} vs {}", d.radius, best);
        }
    }
}
