use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{q_magnitude, ComplexField};
use crate::error::{invalid, Error, Result};
use crate::field::Quadrature;

/// Exponents `(a, b, c)` of `x^a y^b t^c` with homogeneous degree
/// `a + b + 2c ≤ 4`.
pub const MONOMIALS: [(i32, i32, i32); 22] = [
    (0, 0, 0),
    (1, 0, 0),
    (0, 1, 0),
    (2, 0, 0),
    (1, 1, 0),
    (0, 2, 0),
    (3, 0, 0),
    (2, 1, 0),
    (1, 2, 0),
    (0, 3, 0),
    (4, 0, 0),
    (3, 1, 0),
    (2, 2, 0),
    (1, 3, 0),
    (0, 4, 0),
    (0, 0, 1),
    (1, 0, 1),
    (0, 1, 1),
    (2, 0, 1),
    (1, 1, 1),
    (0, 2, 1),
    (0, 0, 2),
];

/// Complex polynomial over [`MONOMIALS`] with coefficients uniform in the
/// unit square.
pub fn random_polynomial<R: Rng>(rng: &mut R) -> ComplexField {
    let coeffs: Vec<Complex64> = MONOMIALS
        .iter()
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    ComplexField::new(move |p| {
        MONOMIALS
            .iter()
            .zip(&coeffs)
            .map(|(&(a, b, c), &k)| k * (p.x.powi(a) * p.y.powi(b) * p.t.powi(c)))
            .sum()
    })
}

/// One line of the coercive study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoerciveRow {
    pub field_id: usize,
    pub p: f64,
    /// `‖D_h u‖_p` with `|D_h u| = (|Xu|² + |Yu|²)^{1/2}`.
    pub dh_norm: f64,
    pub sup_u: f64,
    pub q_norm: f64,
    pub ratio: f64,
}

/// `‖D_h u‖_p / (sup|u| + ‖Qu‖_p)` over the quadrature region.
pub fn coercive_ratio(u: &ComplexField, quad: &Quadrature, p: f64) -> Result<CoerciveRow> {
    if !(p >= 1.0) {
        return Err(invalid("p", format!("{p} is below 1")));
    }
    let mut dh = Vec::with_capacity(quad.len());
    let mut q = Vec::with_capacity(quad.len());
    let mut sup_u: f64 = 0.0;
    for &pt in &quad.points {
        let (xu, yu) = u.horizontal_derivatives(pt);
        dh.push((xu.norm_sqr() + yu.norm_sqr()).sqrt());
        let zu = 0.5 * (xu - Complex64::i() * yu);
        let zbar_u = 0.5 * (xu + Complex64::i() * yu);
        q.push(q_magnitude((zu.re, zbar_u)));
        sup_u = sup_u.max(u.value(pt).norm());
    }
    let dh_norm = quad.lp_norm(&dh, p);
    let q_norm = quad.lp_norm(&q, p);
    let denom = sup_u + q_norm;
    if denom == 0.0 {
        return Err(Error::Degenerate("u vanishes on the region".into()));
    }
    Ok(CoerciveRow {
        field_id: 0,
        p,
        dh_norm,
        sup_u,
        q_norm,
        ratio: dh_norm / denom,
    })
}

/// Ratios over a seeded family and their maximum `Ĉ(p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoerciveStudy {
    pub rows: Vec<CoerciveRow>,
    pub c_hat: f64,
}

impl CoerciveStudy {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("field_id,p,dh_norm,sup_u,q_norm,ratio\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.field_id, r.p, r.dh_norm, r.sup_u, r.q_norm, r.ratio
            );
        }
        s
    }

    /// Whether every field satisfies `‖D_h u‖ ≤ Ĉ (sup|u| + ‖Qu‖)`.
    pub fn all_bounded(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.dh_norm <= self.c_hat * (r.sup_u + r.q_norm) * (1.0 + 1e-12))
    }
}

/// Field `i` uses its own stream of the generator seeded with `seed`, so a
/// larger family extends a smaller one.
pub fn coercive_study(seed: u64, fields: usize, p: f64, quad: &Quadrature) -> Result<CoerciveStudy> {
    let rows = (0..fields)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let u = random_polynomial(&mut rng);
            let mut row = coercive_ratio(&u, quad, p)?;
            row.field_id = i;
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let c_hat = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(CoerciveStudy { rows, c_hat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Ball;

    #[test]
    fn ratio_examples() {
        let quad = Quadrature::ball(&Ball::unit(), 12).unwrap();
        let r = coercive_ratio(&ComplexField::new(|_| Complex64::new(1e-9, 0.0)), &quad, 2.0).unwrap();
        assert_eq!(r.ratio, 0.0);
        // u = z: |D_h u| = √2, sup|u| = 1 up to sampling, Qu = (1, 0).
        let r = coercive_ratio(&ComplexField::new(|p| p.z()), &quad, 2.0).unwrap();
        let vol = quad.volume();
        assert!((r.dh_norm - (2.0 * vol).sqrt()).abs() < 1e-8);
        assert!((r.q_norm - vol.sqrt()).abs() < 1e-8);
        assert!(r.sup_u <= 1.0 && r.sup_u > 0.9);
        assert!(coercive_ratio(&ComplexField::new(|_| Complex64::new(0.0, 0.0)), &quad, 2.0).is_err());
    }

    #[test]
    fn families_extend_and_csv_is_stable() {
        let quad = Quadrature::ball(&Ball::unit(), 8).unwrap();
        let a = coercive_study(7, 6, 2.0, &quad).unwrap();
        let b = coercive_study(7, 12, 2.0, &quad).unwrap();
        assert_eq!(a.rows[..], b.rows[..6]);
        assert_eq!(a.to_csv(), coercive_study(7, 6, 2.0, &quad).unwrap().to_csv());
        assert!(a.all_bounded() && b.c_hat >= a.c_hat);
    }
}
