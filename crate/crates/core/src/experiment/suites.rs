use std::f64::consts::TAU;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::ScenarioConfig;
use crate::cc::cc_dist;
use crate::error::{Error, Result};
use crate::field::{contact_flow_map, dh, FlowKind, Grid, Potential, Quadrature, SampledMap};
use crate::fit::{fit_dh, vertical_adjust};
use crate::group::{Ball, Point};
use crate::isometry::{deviation_scaling_check, Isometry};
use crate::john::{build_chain, propagate_global, DomainSpec, JohnDomain, PropagationOptions};
use crate::operator_q::{
    bso_exp_check, bso_test_balls, coercive_study, largest_c2, main_inequality_residual, BsoInput,
};
use crate::sampling::{ball_samples, unit_cc_sphere_point, SampleBudget};

/// Names accepted by [`run_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteName {
    Lemma1,
    Lemma2,
    Lemma8,
    Prop1,
    Coercive,
    MainIneq,
    Bso,
}

impl SuiteName {
    pub const ALL: [SuiteName; 7] = [
        SuiteName::Lemma1,
        SuiteName::Lemma2,
        SuiteName::Lemma8,
        SuiteName::Prop1,
        SuiteName::Coercive,
        SuiteName::MainIneq,
        SuiteName::Bso,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::Lemma1 => "lemma1",
            SuiteName::Lemma2 => "lemma2",
            SuiteName::Lemma8 => "lemma8",
            SuiteName::Prop1 => "prop1",
            SuiteName::Coercive => "coercive",
            SuiteName::MainIneq => "main_ineq",
            SuiteName::Bso => "bso",
        }
    }

    /// The inequality a suite checks, as printed in failure messages.
    pub fn anchor(self) -> &'static str {
        match self {
            SuiteName::Lemma1 => "vertical adjustment: sup ρ(b·F, Φ) ≤ (ε + √(2(L+1)ε)) r",
            SuiteName::Lemma2 => "isometry deviation scaling: (2s+1) r ε and |D_hΦ - I| ≤ 2ε",
            SuiteName::Lemma8 => "chain of balls: enlargement, ratio, radius-sum and containment clauses",
            SuiteName::Prop1 => "local to global: d^H ≤ c₁ σ β with c₁ = 8κ/(2κ-1)(4Lκβ/α + 2L + 1)",
            SuiteName::Coercive => "coercive estimate: ‖D_h u‖_p ≤ C (sup|u| + ‖Qu‖_p)",
            SuiteName::MainIneq => "pointwise inequality: |Qu| ≤ ε(ε+2)/2 (|D_hF - I| + 2) + |D_hF - I|²/2",
            SuiteName::Bso => "bounded specific oscillation and exponential integrability ≤ 16",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Refused,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Refused => "refused",
        }
    }
}

/// One numeric comparison `value ≤ bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub case: String,
    pub status: Status,
    pub value: f64,
    pub bound: f64,
    pub detail: String,
}

impl Check {
    fn le(case: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            case: case.into(),
            status: if value <= bound { Status::Pass } else { Status::Fail },
            value,
            bound,
            detail: String::new(),
        }
    }

    fn with(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    fn refused(case: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            case: case.into(),
            status: Status::Refused,
            value: f64::NAN,
            bound: f64::NAN,
            detail: detail.into(),
        }
    }

    fn failed(case: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            case: case.into(),
            status: Status::Fail,
            value: f64::NAN,
            bound: f64::NAN,
            detail: detail.into(),
        }
    }

    pub fn margin(&self) -> f64 {
        self.bound - self.value
    }
}

/// All checks of one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: SuiteName,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn count(&self, s: Status) -> usize {
        self.checks.iter().filter(|c| c.status == s).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    /// Human-readable failure lines naming the inequality and the margin.
    pub fn failure_messages(&self) -> Vec<String> {
        self.failures()
            .map(|c| {
                format!(
                    "{} [{}] {}: value {:e} exceeds bound {:e} (margin {:e}) {}",
                    self.suite,
                    self.suite.anchor(),
                    c.case,
                    c.value,
                    c.bound,
                    c.margin(),
                    c.detail
                )
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("# {}: {}\nsuite,case,status,value,bound,margin,detail\n", self.suite, self.suite.anchor());
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{},{},{},{:.16e},{:.16e},{:.16e},{}",
                self.suite,
                c.case,
                c.status.as_str(),
                c.value,
                c.bound,
                c.margin(),
                c.detail.replace(',', ";")
            );
        }
        s
    }
}

/// Runs one suite.
pub fn run_suite(name: SuiteName, cfg: &ScenarioConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let checks = match name {
        SuiteName::Lemma1 => vertical_adjustment(cfg)?,
        SuiteName::Lemma2 => deviation_scaling(cfg)?,
        SuiteName::Lemma8 => chains(cfg)?,
        SuiteName::Prop1 => propagation(cfg)?,
        SuiteName::Coercive => coercive(cfg)?,
        SuiteName::MainIneq => main_inequality(cfg)?,
        SuiteName::Bso => oscillation(cfg)?,
    };
    Ok(SuiteReport { suite: name, checks })
}

fn rng_for(cfg: &ScenarioConfig, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    rng
}

/// Small contact flows with random Hamiltonians.
fn random_flows(cfg: &ScenarioConfig, grid: Grid, stream: u64) -> Result<Vec<(String, SampledMap)>> {
    let mut rng = rng_for(cfg, stream);
    (0..cfg.suite.flows)
        .map(|i| {
            let pot = Potential::random(&mut rng, 1.0);
            let f = contact_flow_map(pot, cfg.suite.flow_time, 8, grid, FlowKind::Analytic)?;
            Ok((format!("flow{i}"), f))
        })
        .collect()
}

fn vertical_adjustment(cfg: &ScenarioConfig) -> Result<Vec<Check>> {
    let ball = Ball::unit();
    let grid = Grid::cube(2.0, 3)?;
    let budget = SampleBudget::new(1024, 384);
    let mut maps: Vec<(String, SampledMap)> = [0.001, 0.01, 0.05, cfg.suite.small_eps]
        .iter()
        .map(|&e| Ok((format!("dilation eps={e}"), SampledMap::dilation(grid, 1.0 + e)?)))
        .collect::<Result<_>>()?;
    maps.extend(random_flows(cfg, grid, 1)?);
    let rows = maps
        .par_iter()
        .map(|(case, f)| {
            let pairs = ball_samples(&ball, budget)?
                .into_iter()
                .map(|x| Ok((x, f.eval(x)?)))
                .collect::<Result<Vec<_>>>()?;
            let phi = fit_dh(&pairs)?.iso.inverse();
            let v = vertical_adjust(f, &phi, &ball, budget)?;
            let detail = format!("eps_hat={:.3e} L={:.6}", v.eps_hat, v.l_est);
            Ok(vec![
                Check::le(format!("{case} (L+1) form"), v.proximity, v.quasi_isometric_bound()).with(detail.clone()),
                Check::le(format!("{case} |D_hF + D_hΦ| form"), v.proximity, v.general_bound()).with(detail),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn deviation_scaling(cfg: &ScenarioConfig) -> Result<Vec<Check>> {
    const SLACK: f64 = 1.05;
    let mut rng = rng_for(cfg, 2);
    let cases: Vec<(Isometry, Point, f64, f64)> = (0..cfg.suite.instances)
        .map(|_| {
            let small = rng.gen_bool(0.5);
            let angle = if small { rng.gen_range(-0.05..0.05) } else { rng.gen_range(0.0..TAU) };
            let span = if small { 0.05 } else { 2.0 };
            let iso = Isometry::new(
                rng.gen_bool(0.2),
                angle,
                Point::new(
                    rng.gen_range(-span..span),
                    rng.gen_range(-span..span),
                    rng.gen_range(-2.0..2.0),
                ),
            );
            let a = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (iso, a, rng.gen_range(0.2..2.0), rng.gen_range(1.0..5.0))
        })
        .collect();
    let budget = SampleBudget::new(3072, 1024);
    let rows = cases
        .par_iter()
        .enumerate()
        .map(|(i, &(iso, a, r, s))| {
            let d = deviation_scaling_check(&iso, a, r, s, budget)?;
            let eps = d.epsilon(r);
            Ok(vec![
                Check::le(format!("case{i} outer ball"), d.sup_outer, (2.0 * s + 1.0) * r * eps * SLACK + 1e-12)
                    .with(format!("r={r:.3} s={s:.3}")),
                Check::le(format!("case{i} differential"), d.dh_matrix_dev, 2.0 * eps * SLACK + 1e-12),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// The configured domain when it is a box, else `[-1,1]³`; likewise for balls.
fn test_domains(cfg: &ScenarioConfig) -> Result<Vec<(&'static str, JohnDomain)>> {
    let ball = match cfg.domain {
        DomainSpec::CcBall { .. } => cfg.domain,
        _ => DomainSpec::unit_ball(),
    };
    let boxed = match cfg.domain {
        DomainSpec::Box { .. } => cfg.domain,
        _ => DomainSpec::Box {
            lo: [-1.0; 3],
            hi: [1.0; 3],
        },
    };
    Ok(vec![("ball", JohnDomain::new(ball)?), ("box", JohnDomain::new(boxed)?)])
}

/// Points approaching the boundary, `1 - 10^{-j}` of the way from `x_*`.
fn approach(domain: &JohnDomain, toward: Point, decades: std::ops::RangeInclusive<i32>) -> Result<Vec<Point>> {
    decades
        .map(|j| {
            let f = 1.0 - 10f64.powi(-j);
            match domain.spec {
                DomainSpec::CcBall { radius, .. } => {
                    let u = crate::group::dilate(f * radius, toward)?;
                    Ok(domain.x_star * u)
                }
                DomainSpec::Box { .. } => {
                    let (s, c) = (domain.x_star.to_array(), toward.to_array());
                    Ok(Point::from_array(std::array::from_fn(|a| s[a] + f * (c[a] - s[a]))))
                }
            }
        })
        .collect()
}

fn chains(cfg: &ScenarioConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (label, domain) in test_domains(cfg)? {
        let targets: Vec<Point> = match domain.spec {
            DomainSpec::CcBall { .. } => (0..6)
                .map(|i| unit_cc_sphere_point(i as f64 * 1.1, 0.15 + 0.14 * i as f64, i % 2 == 0))
                .collect(),
            DomainSpec::Box { lo, hi } => vec![
                Point::from_array(hi),
                Point::from_array(lo),
                Point::new(hi[0], lo[1], hi[2]),
                Point::new(hi[0], 0.5 * (lo[1] + hi[1]), hi[2]),
                Point::new(0.5 * (lo[0] + hi[0]), hi[1], 0.5 * (lo[2] + hi[2])),
                Point::new(0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), hi[2]),
            ],
        };
        for &kappa in &cfg.suite.kappas {
            let runs = targets
                .par_iter()
                .enumerate()
                .map(|(ti, &t)| {
                    let pts = approach(&domain, t, 1..=5)?;
                    let mut checks = Vec::new();
                    let mut ks = Vec::new();
                    for (j, &x) in pts.iter().enumerate() {
                        let case = format!("{label} kappa={kappa} target{ti} decade{}", j + 1);
                        match build_chain(&domain, x, kappa) {
                            Ok((_, rep)) => {
                                let m = rep
                                    .enlargement_margin
                                    .min(rep.reach_margin)
                                    .min(rep.ratio_margin)
                                    .min(rep.sum_margin)
                                    .min(rep.containment_margin);
                                checks.push(Check::le(case, -m, 0.0).with(format!("k={}", rep.k)));
                                ks.push(rep.k as f64);
                            }
                            Err(e @ Error::ChainClause { .. }) => checks.push(Check::failed(case, e.to_string())),
                            Err(e) => return Err(e),
                        }
                    }
                    if ks.len() == pts.len() {
                        // Per-decade increments stay comparable: logarithmic growth.
                        let inc: Vec<f64> = ks.windows(2).skip(1).map(|w| w[1] - w[0]).collect();
                        let (lo, hi) = inc.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
                        checks.push(
                            Check::le(format!("{label} kappa={kappa} target{ti} log growth"), hi, 2.0 * lo.max(1.0) + 2.0)
                                .with(format!("k per decade {inc:?}")),
                        );
                    }
                    Ok(checks)
                })
                .collect::<Result<Vec<_>>>()?;
            out.extend(runs.into_iter().flatten());
        }
    }
    Ok(out)
}

fn propagation(cfg: &ScenarioConfig) -> Result<Vec<Check>> {
    let opts = |kappa: f64| PropagationOptions {
        kappa,
        queries: cfg.suite.queries,
        ball_budget: SampleBudget::new(192, 64),
        sup_budget: SampleBudget::new(1024, 384),
        ..Default::default()
    };
    let mut out = Vec::new();
    for (label, domain) in test_domains(cfg)? {
        let grid = domain.grid(3, 0.5)?;
        let maps: Vec<(&str, SampledMap)> = vec![
            (
                "isometry",
                SampledMap::isometry(grid, Isometry::new(false, 0.9, Point::new(0.3, -0.4, 0.5))),
            ),
            ("dilation", SampledMap::dilation(grid, 1.02)?),
            (
                "contact flow",
                contact_flow_map(Potential::wave(), cfg.suite.flow_time, 8, grid, FlowKind::Analytic)?,
            ),
        ];
        for &kappa in &cfg.suite.kappas {
            for (name, f) in &maps {
                let case = format!("{label} kappa={kappa} {name}");
                let p = match propagate_global(f, &domain, opts(kappa)) {
                    Ok(p) => p,
                    Err(e @ Error::ChainClause { .. }) => {
                        out.push(Check::failed(case, e.to_string()));
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let detail = format!(
                    "sigma={:.3e} L={:.5} c1={:.4} balls={}",
                    p.sigma_hat, p.l_est, p.c1, p.balls_fitted
                );
                out.push(Check::le(format!("{case} d^H"), p.sup_dh, p.bound_dh + 1e-9).with(detail.clone()));
                out.push(Check::le(format!("{case} rho"), p.sup_rho, p.bound_rho + 1e-9).with(detail));
                out.push(Check::le(format!("{case} c1 <= 56 L kappa beta/alpha"), p.c1, p.c1_simple));
            }
        }
    }
    Ok(out)
}

/// Quadrature of the unit CC ball at the configured resolution.
fn unit_quadrature(cfg: &ScenarioConfig) -> Result<Quadrature> {
    Quadrature::ball(&Ball::unit(), cfg.grid)
}

fn coercive(cfg: &ScenarioConfig) -> Result<Vec<Check>> {
    let quad = unit_quadrature(cfg)?;
    let n = cfg.suite.coercive_fields;
    let p = cfg.suite.p;
    let base = coercive_study(cfg.seed, n, p, &quad)?;
    let doubled = coercive_study(cfg.seed, 2 * n, p, &quad)?;
    let change = (doubled.c_hat - base.c_hat).abs() / base.c_hat;
    let mut out = vec![
        Check::le(format!("C({p}) finite over {n} fields"), base.c_hat, f64::MAX),
        Check::le(format!("C({p}) change from {n} to {} fields", 2 * n), change, 0.1)
            .with(format!("C={:.6} -> {:.6}", base.c_hat, doubled.c_hat)),
    ];
    for (study, label) in [(&base, "base"), (&doubled, "doubled")] {
        let worst = study
            .rows
            .iter()
            .map(|r| r.dh_norm - study.c_hat * (r.sup_u + r.q_norm))
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(Check::le(format!("every {label} field bounded by C({p})"), worst, 1e-12 * study.c_hat));
    }
    Ok(out)
}

fn main_inequality(cfg: &ScenarioConfig) -> Result<Vec<Check>> {
    let grid = Grid::cube(2.0, 3)?;
    let pts = Grid::cube(1.0, 9)?.nodes();
    let mut maps: Vec<(String, SampledMap)> = Vec::new();
    for e in [0.01, 0.05, 0.1, 0.19] {
        maps.push((format!("dilation eps={e}"), SampledMap::dilation(grid, 1.0 + e)?));
        let rot = Isometry::new(false, 0.4, Point::new(0.1, 0.2, 0.3));
        maps.push((format!("isometry after dilation eps={e}"), SampledMap::dilation(grid, 1.0 + e)?.then_isometry(rot)));
    }
    maps.extend(random_flows(cfg, grid, 3)?);
    maps.push(("reflection".into(), SampledMap::isometry(grid, Isometry::reflection())));
    maps.push((
        "reflection after dilation".into(),
        SampledMap::dilation(grid, 1.05)?.then_isometry(Isometry::reflection()),
    ));
    maps.par_iter()
        .map(|(case, f)| match main_inequality_residual(f, &pts) {
            Ok(m) if m.eps_hat > 0.2 => Ok(Check::refused(case.clone(), format!("eps_hat {} above 0.2", m.eps_hat))),
            Ok(m) => Ok(Check::le(case.clone(), -m.worst_scaled(), 1e-8).with(format!("eps_hat={:.3e}", m.eps_hat))),
            Err(Error::Refused(why)) => Ok(Check::refused(case.clone(), why)),
            Err(e) => Err(e),
        })
        .collect()
}

fn oscillation(cfg: &ScenarioConfig) -> Result<Vec<Check>> {
    let domain = JohnDomain::cc_ball(Point::IDENTITY, 1.0)?;
    let quad = domain.quadrature(cfg.grid)?;
    let balls = bso_test_balls(&domain, 64, 2.0)?;
    let (q, c2) = (cfg.suite.q, cfg.suite.c2);
    let (alpha, beta) = (domain.alpha, domain.beta);
    let grid = domain.grid(3, 0.5)?;
    let eps = 0.05;
    let rot = 0.6f64;
    let flow = contact_flow_map(Potential::wave(), cfg.suite.flow_time, 8, grid, FlowKind::Analytic)?;
    let flow_field = dh(&flow, &quad.points)?.mats;
    let flow_sigma = {
        let probe = BsoInput::new(&quad, flow_field.clone())?;
        bso_exp_check(&probe, &balls, q, 1.0, c2, alpha, beta)?.worst_ratio.max(1e-12)
    };
    let fields: Vec<(&str, Vec<Matrix2<f64>>, f64)> = vec![
        ("constant rotation", vec![Matrix2::new(rot.cos(), -rot.sin(), rot.sin(), rot.cos()); quad.len()], 1e-6),
        ("dilation differential", vec![Matrix2::identity() * (1.0 + eps); quad.len()], eps),
        ("contact flow differential", flow_field, flow_sigma),
    ];
    let mut out = Vec::new();
    for (name, mats, sigma) in fields {
        let input = BsoInput::new(&quad, mats)?;
        let r = bso_exp_check(&input, &balls, q, sigma, c2, alpha, beta)?;
        let c2_max = largest_c2(&input, &balls[0], sigma, alpha, beta)?;
        let detail = format!("sigma={sigma:.3e} balls={} largest c2={c2_max:.4e}", r.balls_tested);
        out.push(Check::le(format!("{name} oscillation"), r.worst_ratio, 1.0 + 1e-12).with(detail.clone()));
        out.push(Check::le(format!("{name} exp ratio c2={c2}"), r.exp_ratio, 16.0).with(detail));
    }
    // A single large cell must be detected.
    let mut mats = vec![Matrix2::identity(); quad.len()];
    let near = (0..quad.len())
        .min_by(|&a, &b| {
            let d = |i: usize| cc_dist(Point::IDENTITY, quad.points[i]).unwrap_or(f64::INFINITY);
            d(a).total_cmp(&d(b))
        })
        .expect("nonempty quadrature");
    mats[near] = Matrix2::identity() * 50.0;
    let r = bso_exp_check(&BsoInput::new(&quad, mats)?, &balls, q, 0.01, c2, alpha, beta)?;
    out.push(
        Check::le("one large cell is flagged", if r.pass { 1.0 } else { 0.0 }, 0.0)
            .with(format!("worst ratio {:.3e}", r.worst_ratio)),
    );
    Ok(out)
}
