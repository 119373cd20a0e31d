use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{contact_flow_map, FlowKind, Potential, SampledMap};
use crate::group::Point;
use crate::isometry::Isometry;
use crate::john::{DomainSpec, JohnDomain};
use crate::sampling::SampleBudget;

/// Map families generated from the configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapFamily {
    Dilation {
        epsilon: f64,
    },
    Isometry {
        reflect: bool,
        angle: f64,
        trans: [f64; 3],
    },
    ContactFlow {
        potential: PotentialId,
        time: f64,
        rk_steps: usize,
    },
}

/// Named contact Hamiltonians.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialId {
    LinearX,
    Xy,
    Wave,
}

impl PotentialId {
    pub fn potential(self) -> Potential {
        match self {
            PotentialId::LinearX => Potential::linear_x(),
            PotentialId::Xy => Potential::xy(),
            PotentialId::Wave => Potential::wave(),
        }
    }
}

impl MapFamily {
    /// The map, defined on a grid around `domain`.
    pub fn build(&self, domain: &JohnDomain) -> Result<SampledMap> {
        let grid = domain.grid(3, 0.5)?;
        match *self {
            MapFamily::Dilation { epsilon } => SampledMap::dilation(grid, 1.0 + epsilon),
            MapFamily::Isometry { reflect, angle, trans } => Ok(SampledMap::isometry(
                grid,
                Isometry::new(reflect, angle, Point::from_array(trans)),
            )),
            MapFamily::ContactFlow {
                potential,
                time,
                rk_steps,
            } => contact_flow_map(potential.potential(), time, rk_steps, grid, FlowKind::Analytic),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Samples {
    pub interior: usize,
    pub boundary: usize,
}

impl From<Samples> for SampleBudget {
    fn from(s: Samples) -> Self {
        SampleBudget::new(s.interior, s.boundary)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SharpnessConfig {
    pub epsilons: Vec<f64>,
}

impl Default for SharpnessConfig {
    fn default() -> Self {
        Self {
            epsilons: (0..8).map(|i| 10f64.powf(-3.0 + 2.0 * i as f64 / 7.0)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Chain parameters tried by the chain and propagation suites.
    pub kappas: Vec<f64>,
    /// Threshold below which `ε` counts as small.
    pub small_eps: f64,
    /// Random instances of the isometry scaling suite.
    pub instances: usize,
    /// Random contact flows per suite.
    pub flows: usize,
    pub flow_time: f64,
    /// Fields in the base coercive family; the family is then doubled.
    pub coercive_fields: usize,
    /// Exponent of the coercive norms.
    pub p: f64,
    /// Exponent of the oscillation check.
    pub q: f64,
    pub c2: f64,
    /// Query points per chain in the propagation suite.
    pub queries: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            kappas: vec![1.0, 2.0, 4.0],
            small_eps: 0.1,
            instances: 100,
            flows: 20,
            flow_time: 0.05,
            coercive_fields: 200,
            p: 2.0,
            q: 2.0,
            c2: 1.0,
            queries: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
}

/// A complete experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub seed: u64,
    /// Worker threads; `0` uses every core.
    pub workers: usize,
    /// Quadrature cells per axis.
    pub grid: usize,
    pub domain: DomainSpec,
    pub samples: Samples,
    pub family: MapFamily,
    pub sharpness: SharpnessConfig,
    pub suite: SuiteConfig,
    pub output: OutputConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            name: "default".into(),
            seed: 42,
            workers: 0,
            grid: 16,
            domain: DomainSpec::unit_ball(),
            samples: Samples {
                interior: 3072,
                boundary: 1024,
            },
            family: MapFamily::Dilation { epsilon: 0.05 },
            sharpness: SharpnessConfig::default(),
            suite: SuiteConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(bad(format!("{name} must be positive and finite, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| bad(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn budget(&self) -> SampleBudget {
        self.samples.into()
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid < 2 {
            return Err(bad(format!("grid must be at least 2, got {}", self.grid)));
        }
        if self.samples.interior == 0 {
            return Err(bad("samples.interior must be positive"));
        }
        JohnDomain::new(self.domain).map_err(|e| bad(format!("domain: {e}")))?;
        match self.family {
            MapFamily::Dilation { epsilon } => {
                if !(epsilon.is_finite() && epsilon > -1.0) {
                    return Err(bad(format!("family.epsilon must exceed -1, got {epsilon}")));
                }
            }
            MapFamily::Isometry { angle, trans, .. } => {
                if !angle.is_finite() || !trans.iter().all(|c| c.is_finite()) {
                    return Err(bad("family isometry parameters must be finite"));
                }
            }
            MapFamily::ContactFlow { time, rk_steps, .. } => {
                if !time.is_finite() || rk_steps == 0 {
                    return Err(bad("family flow needs finite time and rk_steps > 0"));
                }
            }
        }
        let eps = &self.sharpness.epsilons;
        if eps.len() < 2 {
            return Err(bad("sharpness.epsilons needs at least two values"));
        }
        for &e in eps {
            positive("sharpness.epsilons entry", e)?;
        }
        let (lo, hi) = eps.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &e| (l.min(e), h.max(e)));
        if hi / lo < 10.0 * (1.0 - 1e-12) {
            return Err(bad("sharpness.epsilons must span at least one decade"));
        }
        let s = &self.suite;
        if s.kappas.is_empty() || s.kappas.iter().any(|&k| !(k.is_finite() && k >= 1.0)) {
            return Err(bad("suite.kappas must be nonempty with entries at least 1"));
        }
        positive("suite.small_eps", s.small_eps)?;
        positive("suite.flow_time", s.flow_time)?;
        positive("suite.c2", s.c2)?;
        if !(s.p >= 1.0 && s.p.is_finite()) || !(s.q >= 1.0 && s.q.is_finite()) {
            return Err(bad("suite.p and suite.q must be at least 1"));
        }
        if s.instances == 0 || s.flows == 0 || s.coercive_fields == 0 || s.queries == 0 {
            return Err(bad("suite counts must be positive"));
        }
        Ok(())
    }
}
