use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::dh::{fit_dh_with, Branch, DHFitResult, FitOptions};
use crate::cc::cc_dist;
use crate::error::{invalid, Error, Result};
use crate::field::{dh, qi_report, SampledMap};
use crate::group::{d_h, koranyi_dist, Ball, Point};
use crate::isometry::{op_norm, Isometry};
use crate::john::JohnDomain;
use crate::sampling::{ball_samples, sup_over, SampleBudget};

/// Result of the vertical adjustment on one ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalAdjust {
    /// Height of `b = (0,0,β)`.
    pub beta: f64,
    /// Sampled sup of `ρ(b·F(x), Φ(x))`.
    pub proximity: f64,
    /// Sampled sup of `d^H(F(x), Φ(x))`.
    pub sup_dh: f64,
    pub radius: f64,
    /// `sup_dh / r`.
    pub eps_hat: f64,
    /// Sampled sup of `|D_hF + D_hΦ|`.
    pub dh_sum_sup: f64,
    pub l_est: f64,
}

impl VerticalAdjust {
    /// `(ε + √(2ε‖D_hF + D_hΦ‖_∞)) r`.
    pub fn general_bound(&self) -> f64 {
        (self.eps_hat + (2.0 * self.eps_hat * self.dh_sum_sup).sqrt()) * self.radius
    }

    /// `(ε + √(2(L+1)ε)) r`.
    pub fn quasi_isometric_bound(&self) -> f64 {
        (self.eps_hat + (2.0 * (self.l_est + 1.0) * self.eps_hat).sqrt()) * self.radius
    }
}

/// Cancels the vertical gap between `F` and `Φ` at the center of `ball` and
/// measures the remaining proximity over the ball.
pub fn vertical_adjust(f: &SampledMap, phi: &Isometry, ball: &Ball, budget: SampleBudget) -> Result<VerticalAdjust> {
    let a = ball.center;
    let beta = -(phi.apply(a).inv() * f.eval(a)?).t;
    let b = Point::new(0.0, 0.0, beta);
    let points = ball_samples(ball, budget)?;
    let proximity = sup_over(ball, &points, |x| Ok(koranyi_dist(b * f.eval(x)?, phi.apply(x))))?.value;
    let sup_dh = sup_over(ball, &points, |x| Ok(d_h(f.eval(x)?, phi.apply(x))))?.value;
    let field = dh(f, &points)?;
    let m = phi.horizontal_matrix();
    let dh_sum_sup = field.mats.iter().map(|d| op_norm(&(d + m))).fold(0.0, f64::max);
    let l_est = qi_report(f, &points)?.l_est;
    Ok(VerticalAdjust {
        beta,
        proximity,
        sup_dh,
        radius: ball.radius,
        eps_hat: sup_dh / ball.radius,
        dh_sum_sup,
        l_est,
    })
}

/// Sampling settings of [`full_fit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullFitOptions {
    /// Samples for the minimax fit and the suprema.
    pub budget: SampleBudget,
    /// Quadrature cells per axis for the Sobolev deviation.
    pub cells: usize,
    pub fit: FitOptions,
}

impl Default for FullFitOptions {
    fn default() -> Self {
        Self {
            budget: SampleBudget::default(),
            cells: 24,
            fit: FitOptions::default(),
        }
    }
}

/// The isometry `φ` close to `F` and the three measured deviations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullFitResult {
    pub iso: Isometry,
    pub beta: f64,
    pub lambda_hat: f64,
    /// Sampled sup of `d(F(x), φ(x))`.
    pub sup_d: f64,
    /// Sampled sup of `d^H(F(x), φ(x))`.
    pub sup_dh: f64,
    /// `‖D_hF - D_hφ‖` in `L₂` over the domain.
    pub sobolev_dev: f64,
    pub fit: DHFitResult,
}

/// Fits `Ψ` in the `d^H` sense on domain samples, sets `φ = Ψ⁻¹` adjusted by
/// the vertical shift at `x_*`, and measures the deviations.
pub fn full_fit(f: &SampledMap, domain: &JohnDomain, opts: FullFitOptions) -> Result<FullFitResult> {
    let samples = domain.samples(opts.budget)?;
    let pairs = samples
        .par_iter()
        .map(|&x| Ok((x, f.eval(x)?)))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_dh_with(&pairs, opts.fit)?;
    let inv = fit.iso.inverse();
    let a = domain.x_star;
    let beta = -(inv.apply(a).inv() * f.eval(a)?).t;
    let iso = Isometry::translation(Point::new(0.0, 0.0, -beta)).compose(&inv);

    let sup_d = domain.sup(|x| cc_dist(f.eval(x)?, iso.apply(x)), opts.budget)?.value;
    let sup_dh = domain.sup(|x| Ok(d_h(f.eval(x)?, iso.apply(x))), opts.budget)?.value;
    let quad = domain.quadrature(opts.cells)?;
    let field = dh(f, &quad.points)?;
    let m = iso.horizontal_matrix();
    let dev: Vec<f64> = field.mats.iter().map(|d| op_norm(&(d - m))).collect();
    Ok(FullFitResult {
        iso,
        beta,
        lambda_hat: fit.lambda_hat,
        sup_d,
        sup_dh,
        sobolev_dev: quad.lp_norm(&dev, 2.0),
        fit,
    })
}

/// Flat key-value record of a fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitRecord {
    pub branch: Branch,
    pub angle: f64,
    pub trans_x: f64,
    pub trans_y: f64,
    pub trans_t: f64,
    pub lambda_hat: f64,
    pub sup_d: f64,
    pub sup_dh: f64,
    pub sobolev_dev: f64,
}

impl From<&FullFitResult> for FitRecord {
    fn from(r: &FullFitResult) -> Self {
        Self {
            branch: if r.iso.reflect { Branch::Reflected } else { Branch::Direct },
            angle: r.iso.angle,
            trans_x: r.iso.trans.x,
            trans_y: r.iso.trans.y,
            trans_t: r.iso.trans.t,
            lambda_hat: r.lambda_hat,
            sup_d: r.sup_d,
            sup_dh: r.sup_dh,
            sobolev_dev: r.sobolev_dev,
        }
    }
}

impl FitRecord {
    pub fn isometry(&self) -> Isometry {
        Isometry::new(
            self.branch.reflect(),
            self.angle,
            Point::new(self.trans_x, self.trans_y, self.trans_t),
        )
    }

    fn numbers(&self) -> [(&'static str, f64); 8] {
        [
            ("angle", self.angle),
            ("trans_x", self.trans_x),
            ("trans_y", self.trans_y),
            ("trans_t", self.trans_t),
            ("lambda_hat", self.lambda_hat),
            ("sup_d", self.sup_d),
            ("sup_dH", self.sup_dh),
            ("sobolev_dev", self.sobolev_dev),
        ]
    }
}

impl fmt::Display for FitRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "branch={}", self.branch.as_str())?;
        for (k, v) in self.numbers() {
            writeln!(f, "{k}={v:.16e}")?;
        }
        Ok(())
    }
}

impl FromStr for FitRecord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut rec = FitRecord {
            branch: Branch::Direct,
            angle: f64::NAN,
            trans_x: f64::NAN,
            trans_y: f64::NAN,
            trans_t: f64::NAN,
            lambda_hat: f64::NAN,
            sup_d: f64::NAN,
            sup_dh: f64::NAN,
            sobolev_dev: f64::NAN,
        };
        let mut seen = [false; 9];
        for (line_no, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: line_no + 1,
                column: 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key=value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if key == "branch" {
                rec.branch = match value {
                    "direct" => Branch::Direct,
                    "reflected" => Branch::Reflected,
                    _ => return Err(parse_err(format!("unknown branch {value:?}"))),
                };
                seen[0] = true;
                continue;
            }
            let slot = rec
                .numbers()
                .iter()
                .position(|(k, _)| *k == key)
                .ok_or_else(|| parse_err(format!("unknown key {key:?}")))?;
            let v: f64 = value
                .parse()
                .map_err(|_| parse_err(format!("bad number {value:?}")))?;
            *[
                &mut rec.angle,
                &mut rec.trans_x,
                &mut rec.trans_y,
                &mut rec.trans_t,
                &mut rec.lambda_hat,
                &mut rec.sup_d,
                &mut rec.sup_dh,
                &mut rec.sobolev_dev,
            ][slot] = v;
            seen[slot + 1] = true;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            let key = if i == 0 { "branch" } else { rec.numbers()[i - 1].0 };
            return Err(invalid("record", format!("missing key {key}")));
        }
        Ok(rec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;

    fn grid() -> Grid {
        Grid::cube(2.0, 3).unwrap()
    }

    fn light() -> FullFitOptions {
        FullFitOptions {
            budget: SampleBudget::new(512, 128),
            cells: 12,
            fit: FitOptions::default(),
        }
    }

    #[test]
    fn vertical_adjust_examples() {
        let phi = Isometry::new(false, 0.3, Point::new(0.1, 0.2, 0.3));
        let ball = Ball::unit();
        let budget = SampleBudget::new(256, 64);
        let v = vertical_adjust(&SampledMap::isometry(grid(), phi), &phi, &ball, budget).unwrap();
        assert!(v.beta.abs() < 1e-12 && v.proximity < 1e-6);
        let shifted = Isometry::translation(Point::new(0.0, 0.0, 0.7)).compose(&phi);
        let v = vertical_adjust(&SampledMap::isometry(grid(), shifted), &phi, &ball, budget).unwrap();
        assert!((v.beta + 0.7).abs() < 1e-12 && v.proximity < 1e-6);
    }

    #[test]
    fn isometry_fits_exactly() {
        let d = JohnDomain::cc_ball(Point::IDENTITY, 1.0).unwrap();
        let psi = Isometry::new(true, 1.1, Point::new(-0.4, 0.3, 0.9));
        let r = full_fit(&SampledMap::isometry(grid(), psi), &d, light()).unwrap();
        assert!(r.sup_dh < 1e-8 && r.sobolev_dev < 1e-8, "{r:?}");
        // A height error of one ulp costs √(π·ulp) in d.
        assert!(r.sup_d < 1e-6, "{r:?}");
        assert!(r.iso.field_distance(&psi) < 1e-6);
    }

    #[test]
    fn record_round_trip() {
        let d = JohnDomain::cc_ball(Point::IDENTITY, 1.0).unwrap();
        let f = SampledMap::dilation(grid(), 1.01).unwrap();
        let r = full_fit(&f, &d, light()).unwrap();
        let rec = FitRecord::from(&r);
        let text = rec.to_string();
        assert_eq!(text.lines().count(), 9);
        assert_eq!(text.parse::<FitRecord>().unwrap(), rec);
        assert!("branch=direct\nangle=1\n".parse::<FitRecord>().is_err());
        assert!("angle:1".parse::<FitRecord>().is_err());
    }
}
