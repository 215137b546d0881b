use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Hyperplane};
use crate::learners::{ScheduleConstants, ScheduleMode};
use crate::solvers::HingeConfig;
use crate::synthdata::stream::derive_seed;
use crate::synthdata::{random_unit, MarginalSpec, NoiseSpec};

pub(crate) const TAG_W_STAR: u64 = 0x7753;
pub(crate) const TAG_EVAL: u64 = 0x4556;
pub(crate) const TAG_POOL: u64 = 0x504f;
pub(crate) const TAG_RUN: u64 = 0x5255;
pub(crate) const TAG_VALIDATION: u64 = 0x5641;

/// `"random"` or an explicit (nonzero, normalized on use) vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WStarSpec {
    Named(WStarKind),
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WStarKind {
    Random,
}

impl Default for WStarSpec {
    fn default() -> Self {
        WStarSpec::Named(WStarKind::Random)
    }
}

fn default_cap() -> usize {
    2000
}
fn default_degree() -> usize {
    3
}
fn one() -> usize {
    1
}
fn default_validation() -> usize {
    1000
}
fn default_g_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LearnerSpec {
    Lp {},
    KearnsLi {
        #[serde(default = "default_cap")]
        repetition_cap: usize,
    },
    Averaging {},
    Poly {
        #[serde(default = "default_degree")]
        degree: usize,
        /// More than one run trains on fresh samples and validates.
        #[serde(default = "one")]
        runs: usize,
        #[serde(default = "default_validation")]
        n_validation: usize,
    },
    LocalizeHinge {},
    LocalizePolyHinge {
        #[serde(default = "default_degree")]
        degree: usize,
        /// Noise bound handed to the oracle; defaults to the noise spec's ν.
        #[serde(default)]
        nu: Option<f64>,
        #[serde(default = "default_g_scale")]
        g_scale: f64,
    },
}

impl LearnerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            LearnerSpec::Lp {} => "lp",
            LearnerSpec::KearnsLi { .. } => "kearns_li",
            LearnerSpec::Averaging {} => "averaging",
            LearnerSpec::Poly { .. } => "poly",
            LearnerSpec::LocalizeHinge {} => "localize_hinge",
            LearnerSpec::LocalizePolyHinge { .. } => "localize_poly_hinge",
        }
    }
}

fn default_quota() -> usize {
    4000
}

/// Localization settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    #[serde(default)]
    pub mode: ScheduleMode,
    #[serde(default)]
    pub constants: ScheduleConstants,
    /// Band samples per oracle call.
    #[serde(default = "default_quota")]
    pub quota: usize,
    #[serde(default)]
    pub hinge: HingeConfig,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            mode: ScheduleMode::default(),
            constants: ScheduleConstants::default(),
            quota: default_quota(),
            hinge: HingeConfig::default(),
        }
    }
}

fn default_delta() -> f64 {
    0.1
}
fn default_n_eval() -> usize {
    100_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub marginal: MarginalSpec,
    #[serde(default = "none")]
    pub noise: NoiseSpec,
    pub learner: LearnerSpec,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    pub n_train: usize,
    #[serde(default = "default_n_eval")]
    pub n_eval: usize,
    pub epsilon: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub seed: u64,
    #[serde(default)]
    pub w_star: WStarSpec,
    /// Train on this CSV file instead of generating a training sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub train_data: Option<PathBuf>,
}

fn none() -> NoiseSpec {
    NoiseSpec::None
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.marginal.validate()?;
        self.noise.validate()?;
        let unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} must lie in (0,1), got {v}")))
            }
        };
        unit("epsilon", self.epsilon)?;
        unit("delta", self.delta)?;
        if self.n_eval == 0 {
            return Err(Error::InvalidParameter("n_eval must be >= 1".into()));
        }
        self.schedule.constants.validate()?;
        if self.schedule.quota == 0 {
            return Err(Error::InvalidParameter("schedule.quota must be >= 1".into()));
        }
        if self.schedule.hinge.iters == 0 {
            return Err(Error::InvalidParameter("schedule.hinge.iters must be >= 1".into()));
        }
        if !(self.schedule.hinge.step_radius > 0.0 && self.schedule.hinge.step_radius.is_finite()) {
            return Err(Error::InvalidParameter("schedule.hinge.step_radius must be positive".into()));
        }
        match &self.learner {
            LearnerSpec::KearnsLi { repetition_cap } if *repetition_cap == 0 => {
                return Err(Error::InvalidParameter("repetition_cap must be >= 1".into()));
            }
            LearnerSpec::Poly {
                degree,
                runs,
                n_validation,
            } => {
                if *degree == 0 || *runs == 0 || (*runs > 1 && *n_validation == 0) {
                    return Err(Error::InvalidParameter(
                        "poly needs degree >= 1, runs >= 1 and a nonempty validation set".into(),
                    ));
                }
            }
            LearnerSpec::LocalizePolyHinge { degree, nu, g_scale } => {
                if *degree == 0 {
                    return Err(Error::InvalidParameter("degree must be >= 1".into()));
                }
                if let Some(nu) = nu {
                    if !(0.0..0.5).contains(nu) {
                        return Err(Error::InvalidParameter(format!("nu must lie in [0,0.5), got {nu}")));
                    }
                }
                if !(*g_scale > 0.0 && g_scale.is_finite()) {
                    return Err(Error::InvalidParameter("g_scale must be positive".into()));
                }
            }
            _ => {}
        }
        if let WStarSpec::Explicit(v) = &self.w_star {
            geometry::check_dims(self.marginal.d, v.len())?;
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidParameter("w_star must be finite".into()));
            }
            geometry::normalize(v)?;
        }
        Ok(())
    }

    pub fn resolve_w_star(&self) -> Result<Hyperplane> {
        match &self.w_star {
            WStarSpec::Named(WStarKind::Random) => {
                Ok(random_unit(self.marginal.d, derive_seed(self.seed, TAG_W_STAR, 0)))
            }
            WStarSpec::Explicit(v) => {
                geometry::check_dims(self.marginal.d, v.len())?;
                geometry::normalize(v)
            }
        }
    }

    /// ν the data model guarantees, for oracles that need it.
    pub fn noise_nu(&self) -> f64 {
        match self.noise {
            NoiseSpec::Rcn { nu } | NoiseSpec::Bounded { nu, .. } => nu,
            _ => 0.0,
        }
    }
}

/// Input of the distributional property checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertiesConfig {
    pub marginal: MarginalSpec,
    pub n: usize,
    pub seed: u64,
}

impl PropertiesConfig {
    pub fn from_json(s: &str) -> Result<PropertiesConfig> {
        let cfg: PropertiesConfig = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.marginal.validate()?;
        Ok(cfg)
    }
}
