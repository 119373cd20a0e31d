use std::fmt::Write as _;

use rayon::prelude::*;

use super::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::field::SampledMap;
use crate::fit::{full_fit, FitOptions, FullFitOptions};
use crate::john::JohnDomain;

/// Deviations of the best isometry from `δ_{1+ε}` at one `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpnessRow {
    pub epsilon: f64,
    pub sup_d: f64,
    pub sup_dh: f64,
    pub sobolev_dev: f64,
}

/// The table and its log-log slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessReport {
    pub rows: Vec<SharpnessRow>,
    pub slope_sup_d: f64,
    pub slope_sup_dh: f64,
    pub slope_sobolev: f64,
    pub header: Vec<String>,
}

/// Expected slope windows of `sup_d`, `sup_dH` and `sobolev_dev`.
pub const SLOPE_WINDOWS: [(&str, f64, f64); 3] = [
    ("sup_d", 0.45, 0.6),
    ("sup_dH", 0.9, 1.1),
    ("sobolev_dev", 0.9, 1.1),
];

impl SharpnessReport {
    pub fn slopes(&self) -> [f64; 3] {
        [self.slope_sup_d, self.slope_sup_dh, self.slope_sobolev]
    }

    pub fn slopes_in_windows(&self) -> bool {
        self.slopes()
            .iter()
            .zip(SLOPE_WINDOWS)
            .all(|(s, (_, lo, hi))| (lo..=hi).contains(s))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for h in &self.header {
            let _ = writeln!(s, "# {h}");
        }
        s.push_str("epsilon,sup_d,sup_dH,sobolev_dev\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                r.epsilon, r.sup_d, r.sup_dh, r.sobolev_dev
            );
        }
        s
    }

    pub fn slopes_csv(&self) -> String {
        let mut s = String::from("quantity,slope,lo,hi\n");
        for (v, (name, lo, hi)) in self.slopes().iter().zip(SLOPE_WINDOWS) {
            let _ = writeln!(s, "{name},{v:.16e},{lo},{hi}");
        }
        s
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Runs the full fit on `δ_{1+ε}` for every configured `ε`.
pub fn run_sharpness(cfg: &ScenarioConfig) -> Result<SharpnessReport> {
    cfg.validate()?;
    let domain = JohnDomain::new(cfg.domain)?;
    let opts = FullFitOptions {
        budget: cfg.budget(),
        cells: cfg.grid,
        fit: FitOptions::default(),
    };
    let rows = cfg
        .sharpness
        .epsilons
        .par_iter()
        .map(|&eps| {
            let grid = domain.grid(3, 0.5)?;
            let f = SampledMap::dilation(grid, 1.0 + eps)?;
            let r = full_fit(&f, &domain, opts).map_err(|e| {
                Error::Degenerate(format!("fit failed at epsilon = {eps:e}: {e}"))
            })?;
            Ok(SharpnessRow {
                epsilon: eps,
                sup_d: r.sup_d,
                sup_dh: r.sup_dh,
                sobolev_dev: r.sobolev_dev,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let lx: Vec<f64> = rows.iter().map(|r| r.epsilon.ln()).collect();
    let slope = |f: fn(&SharpnessRow) -> f64| ols_slope(&lx, &rows.iter().map(|r| f(r).ln()).collect::<Vec<_>>());
    Ok(SharpnessReport {
        slope_sup_d: slope(|r| r.sup_d),
        slope_sup_dh: slope(|r| r.sup_dh),
        slope_sobolev: slope(|r| r.sobolev_dev),
        header: vec![
            format!("scenario={}", cfg.name),
            format!("domain={:?}", cfg.domain),
            format!("grid={} samples={}+{}", cfg.grid, cfg.samples.interior, cfg.samples.boundary),
        ],
        rows,
    })
}
