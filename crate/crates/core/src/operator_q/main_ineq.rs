use nalgebra::Matrix2;
use num_complex::Complex64;

use super::q_magnitude;
use crate::error::{Error, Result};
use crate::field::{dh, qi_from_field, Orientation, SampledMap};
use crate::group::Point;
use crate::isometry::op_norm;

/// Pointwise check of `|Qu| ≤ (ε(ε+2)/2)(|D_hF - I| + 2) + |D_hF - I|²/2`
/// for `u = (f₁ - x) + i(f₂ - y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MainInequality {
    pub points: Vec<Point>,
    /// Right side minus left side at each point.
    pub residuals: Vec<f64>,
    /// `|D_hF - I|` at each point.
    pub deviations: Vec<f64>,
    pub eps_hat: f64,
}

impl MainInequality {
    /// Smallest residual relative to `1 + |D_hF - I|²`.
    pub fn worst_scaled(&self) -> f64 {
        self.residuals
            .iter()
            .zip(&self.deviations)
            .map(|(r, d)| r / (1.0 + d * d))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.worst_scaled() >= -tol
    }
}

fn lhs(d: &Matrix2<f64>) -> f64 {
    let i = Complex64::i();
    let xu = Complex64::new(d[(0, 0)] - 1.0, d[(1, 0)]);
    let yu = Complex64::new(d[(0, 1)], d[(1, 1)] - 1.0);
    let zu = 0.5 * (xu - i * yu);
    let zbar_u = 0.5 * (xu + i * yu);
    q_magnitude((zu.re, zbar_u))
}

/// Evaluates both sides at `points`, with `ε̂ = L - 1` from the same points.
/// Maps that reverse orientation somewhere are refused.
pub fn main_inequality_residual(f: &SampledMap, points: &[Point]) -> Result<MainInequality> {
    let field = dh(f, points)?;
    let (l, orientation) = qi_from_field(&field)?;
    match orientation {
        Orientation::Preserving => {}
        Orientation::Reversing => {
            return Err(Error::Refused("orientation: D_hF reverses orientation".into()))
        }
        Orientation::Mixed => {
            return Err(Error::Refused("orientation: sign of det D_hF changes".into()))
        }
    }
    let eps = l - 1.0;
    let id = Matrix2::identity();
    let mut residuals = Vec::with_capacity(points.len());
    let mut deviations = Vec::with_capacity(points.len());
    for d in &field.mats {
        let dev = op_norm(&(d - id));
        let rhs = 0.5 * eps * (eps + 2.0) * (dev + 2.0) + 0.5 * dev * dev;
        residuals.push(rhs - lhs(d));
        deviations.push(dev);
    }
    Ok(MainInequality {
        points: points.to_vec(),
        residuals,
        deviations,
        eps_hat: eps,
    })
}
