use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution constants of the localization analysis. The defaults are the
/// Gaussian values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConstants {
    #[serde(default = "inv_pi")]
    pub c1_upper: f64,
    #[serde(default = "inv_pi")]
    pub c1_lower: f64,
    #[serde(default = "c2_upper")]
    pub c2_upper: f64,
    #[serde(default = "c2_lower")]
    pub c2_lower: f64,
    #[serde(default = "c3_prime")]
    pub c3_prime: f64,
}

fn inv_pi() -> f64 {
    1.0 / PI
}
fn c2_upper() -> f64 {
    0.8
}
fn c2_lower() -> f64 {
    0.48
}
fn c3_prime() -> f64 {
    4.0
}

impl Default for ScheduleConstants {
    fn default() -> Self {
        ScheduleConstants {
            c1_upper: inv_pi(),
            c1_lower: inv_pi(),
            c2_upper: c2_upper(),
            c2_lower: c2_lower(),
            c3_prime: c3_prime(),
        }
    }
}

impl ScheduleConstants {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("c1_upper", self.c1_upper),
            ("c1_lower", self.c1_lower),
            ("c2_upper", self.c2_upper),
            ("c2_lower", self.c2_lower),
            ("c3_prime", self.c3_prime),
        ];
        for (name, v) in all {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// `c_γ = max{C′₃, C̲₁/C̄₂}`
    pub fn c_gamma(&self) -> f64 {
        self.c3_prime.max(self.c1_lower / self.c2_upper)
    }

    /// `c₀ = min{1/4, C̲₁/(4 C̄₂ C′₃)}`
    pub fn c0(&self) -> f64 {
        (0.25f64).min(self.c1_lower / (4.0 * self.c2_upper * self.c3_prime))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleMode {
    Theory,
    #[default]
    Practical,
}

/// Per-round parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundParams {
    pub k: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalizationSchedule {
    pub constants: ScheduleConstants,
    pub mode: ScheduleMode,
    pub epsilon: f64,
    pub c_gamma: f64,
    pub c0: f64,
    pub rounds: usize,
}

impl LocalizationSchedule {
    pub fn new(constants: ScheduleConstants, mode: ScheduleMode, epsilon: f64) -> Result<Self> {
        constants.validate()?;
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon must lie in (0,1), got {epsilon}")));
        }
        let (c_gamma, c0) = match mode {
            ScheduleMode::Theory => (constants.c_gamma(), constants.c0()),
            ScheduleMode::Practical => (1.0, 0.25),
        };
        let raw = (constants.c1_upper * PI / epsilon).log2().ceil() - 1.0;
        let rounds = if raw.is_finite() && raw >= 1.0 { raw as usize } else { 1 };
        Ok(LocalizationSchedule {
            constants,
            mode,
            epsilon,
            c_gamma,
            c0,
            rounds,
        })
    }

    pub fn gaussian(mode: ScheduleMode, epsilon: f64) -> Result<Self> {
        Self::new(ScheduleConstants::default(), mode, epsilon)
    }

    /// `α_k = 2^{-k} π`, rounds counted from 1.
    pub fn alpha(&self, k: usize) -> f64 {
        PI * 0.5f64.powi(k as i32)
    }

    pub fn gamma(&self, k: usize) -> f64 {
        self.c_gamma * self.alpha(k)
    }

    pub fn tau(&self, k: usize) -> f64 {
        let gamma = self.gamma(k);
        match self.mode {
            ScheduleMode::Theory => {
                gamma * self.c0 * self.constants.c2_lower / (4.0 * self.constants.c2_upper)
            }
            ScheduleMode::Practical => gamma / 2.0,
        }
    }

    pub fn round(&self, k: usize) -> RoundParams {
        RoundParams {
            k,
            alpha: self.alpha(k),
            gamma: self.gamma(k),
            tau: self.tau(k),
        }
    }

    pub fn all_rounds(&self) -> Vec<RoundParams> {
        (1..=self.rounds).map(|k| self.round(k)).collect()
    }

    /// Angle floor `ε/C̄₁` below which halving is not required.
    pub fn angle_floor(&self) -> f64 {
        self.epsilon / self.constants.c1_upper
    }
}
