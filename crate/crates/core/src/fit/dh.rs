use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sed::{sed_in_order, shuffled_indices};
use crate::error::{invalid, Error, Result};
use crate::group::Point;
use crate::isometry::{wrap_angle, Isometry};

/// Whether the fitted isometry includes the reflection `ι`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Direct,
    Reflected,
}

impl Branch {
    pub fn reflect(self) -> bool {
        self == Branch::Reflected
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Direct => "direct",
            Branch::Reflected => "reflected",
        }
    }
}

/// Best isometry in the `d^H` minimax sense.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DHFitResult {
    /// `Ψ` minimizing `sup d^H(Ψ(F(x)), x)`, with zero vertical translation.
    pub iso: Isometry,
    pub lambda_hat: f64,
    /// Sample at which the deviation is attained.
    pub argmax_point: Point,
    pub branch: Branch,
}

/// Search resolution of [`fit_dh_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FitOptions {
    /// Coarse grid size on `[0, 2π)`, per branch.
    pub angles: usize,
    /// Number of grid local minima refined by golden-section search.
    pub candidates: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            angles: 720,
            candidates: 4,
        }
    }
}

struct Objective {
    zs: Vec<Complex64>,
    fs: Vec<Complex64>,
}

impl Objective {
    fn residuals(&self, branch: Branch, b: f64) -> Vec<Complex64> {
        let rot = Complex64::from_polar(1.0, b);
        self.zs
            .iter()
            .zip(&self.fs)
            .map(|(&z, &f)| z - rot * if branch.reflect() { f.conj() } else { f })
            .collect()
    }

    fn radius(&self, branch: Branch, b: f64) -> f64 {
        sed_in_order(&self.residuals(branch, b)).radius
    }

    fn golden(&self, branch: Branch, lo: f64, hi: f64) -> (f64, f64) {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (lo, hi);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (self.radius(branch, c), self.radius(branch, d));
        for _ in 0..90 {
            if (b - a).abs() < 1e-14 {
                break;
            }
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = self.radius(branch, c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = self.radius(branch, d);
            }
        }
        if fc <= fd {
            (fc, c)
        } else {
            (fd, d)
        }
    }
}

/// [`fit_dh_with`] at the default resolution.
pub fn fit_dh(samples: &[(Point, Point)]) -> Result<DHFitResult> {
    fit_dh_with(samples, FitOptions::default())
}

/// Fits `Ψ` to pairs `(x, F(x))`. For a fixed angle `B` and branch the
/// optimal planar translation is the center of the smallest disk enclosing
/// `zᵢ - e^{iB} c(fᵢ)`, and the optimum is its radius; the angle is found
/// by a grid scan followed by golden-section refinement.
pub fn fit_dh_with(samples: &[(Point, Point)], opts: FitOptions) -> Result<DHFitResult> {
    if samples.len() < 2 {
        return Err(invalid("samples", "need at least two samples"));
    }
    if opts.angles < 8 || opts.candidates == 0 {
        return Err(invalid("opts", "need at least 8 angles and one candidate"));
    }
    let z0 = samples[0].0.z();
    if samples.iter().all(|(x, _)| x.z() == z0) {
        return Err(Error::Degenerate("all samples share one planar projection".into()));
    }
    if let Some((_, f)) = samples.iter().find(|(x, f)| !x.is_finite() || !f.is_finite()) {
        return Err(Error::Degenerate(format!("non-finite sample value {f:?}")));
    }
    let order = shuffled_indices(samples.len());
    let obj = Objective {
        zs: order.iter().map(|&i| samples[i].0.z()).collect(),
        fs: order.iter().map(|&i| samples[i].1.z()).collect(),
    };
    let n = opts.angles;
    let step = TAU / n as f64;
    let branches = [Branch::Direct, Branch::Reflected];
    let values: Vec<f64> = (0..2 * n)
        .into_par_iter()
        .map(|k| obj.radius(branches[k / n], (k % n) as f64 * step))
        .collect();

    let mut minima: Vec<(f64, Branch, usize)> = Vec::new();
    for (bi, &branch) in branches.iter().enumerate() {
        let v = &values[bi * n..(bi + 1) * n];
        for j in 0..n {
            let (prev, next) = (v[(j + n - 1) % n], v[(j + 1) % n]);
            if v[j] <= prev && v[j] <= next {
                minima.push((v[j], branch, j));
            }
        }
    }
    minima.sort_by(|a, b| a.0.total_cmp(&b.0));
    minima.truncate(opts.candidates);

    let refined: Vec<(f64, Branch, f64)> = minima
        .par_iter()
        .map(|&(v, branch, j)| {
            let b = j as f64 * step;
            let (fv, fb) = obj.golden(branch, b - step, b + step);
            if fv < v {
                (fv, branch, fb)
            } else {
                (v, branch, b)
            }
        })
        .collect();
    let &(_, branch, angle) = refined
        .iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one local minimum on a cyclic grid");

    let disk = sed_in_order(&obj.residuals(branch, angle));
    let iso = Isometry::new(
        branch.reflect(),
        wrap_angle(angle),
        Point::new(disk.center.re, disk.center.im, 0.0),
    );
    let (mut lambda_hat, mut argmax_point) = (0.0, samples[0].0);
    for &(x, f) in samples {
        let d = (iso.apply_planar(f.z()) - x.z()).norm();
        if d > lambda_hat {
            lambda_hat = d;
            argmax_point = x;
        }
    }
    Ok(DHFitResult {
        iso,
        lambda_hat,
        argmax_point,
        branch,
    })
}

/// `π_{(0,0,s)} ∘ iso` with `s` chosen so that the image of `fx` sits at the
/// same height as `x` after left translation by `x⁻¹`.
pub fn cancel_vertical(iso: &Isometry, x: Point, fx: Point) -> Isometry {
    let s = -(x.inv() * iso.apply(fx)).t;
    Isometry::translation(Point::new(0.0, 0.0, s)).compose(iso)
}
