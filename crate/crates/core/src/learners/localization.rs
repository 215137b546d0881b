use std::f64::consts::{FRAC_PI_2, SQRT_2};

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::geometry::{self, ConeCap, Hyperplane, Label, ZERO_NORM};
use crate::learners::{train_poly_regression, Classifier, LocalizationSchedule, RoundParams};
use crate::solvers::{minimize_hinge, HingeConfig, HingeProblem};
use crate::synthdata::{LabeledSample, Sampler};

/// `2Φ(γ) − 1`, the standard Gaussian mass of a band of half-width γ.
pub fn band_mass_reference(gamma: f64) -> f64 {
    erf(gamma / SQRT_2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandFill {
    pub samples: Vec<LabeledSample>,
    pub raw_draws: usize,
}

/// Draws until `quota` samples land in `{x : |w·x| ≤ γ}`, giving up after
/// `⌈50·quota / (2Φ(γ) − 1)⌉` raw draws.
pub fn fill_band(sampler: &mut dyn Sampler, w: &Hyperplane, gamma: f64, quota: usize) -> Result<BandFill> {
    if quota == 0 {
        return Err(Error::InvalidParameter("band quota must be >= 1".into()));
    }
    geometry::check_dims(w.dim(), sampler.dim())?;
    let cap = (50.0 * quota as f64 / band_mass_reference(gamma)).ceil();
    let cap = if cap.is_finite() { cap as usize } else { usize::MAX };
    let mut samples = Vec::with_capacity(quota);
    let mut draws = 0;
    while samples.len() < quota {
        if draws >= cap {
            return Err(Error::InsufficientBandSamples {
                filled: samples.len(),
                quota,
                draws,
            });
        }
        let s = sampler.draw();
        draws += 1;
        if geometry::dot(w, &s.x).abs() <= gamma {
            samples.push(s);
        }
    }
    Ok(BandFill {
        samples,
        raw_draws: draws,
    })
}

/// Extra diagnostics of the polynomial step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolyStepInfo {
    pub train_error: f64,
    pub l1_error: f64,
    /// `(1−2ν)·g(c₀)`, the excess-error target for the polynomial step.
    pub excess_target: f64,
    /// Disagreement of the output with the pseudo-labels on the second band set.
    pub pseudo_disagreement: f64,
    /// Disagreement of the pseudo-labels with `h_{w*}` on the second band set.
    pub pseudo_vs_w_star: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandStep {
    pub w: Hyperplane,
    pub band_samples: usize,
    pub raw_draws: usize,
    pub hinge_objective: Option<f64>,
    /// Error of `h_{w*}` on the band sample, when the sampler knows `w*`.
    pub w_star_band_error: Option<f64>,
    pub poly: Option<PolyStepInfo>,
}

impl BandStep {
    /// A step that drew nothing.
    pub fn bare(w: Hyperplane) -> Self {
        BandStep {
            w,
            band_samples: 0,
            raw_draws: 0,
            hinge_objective: None,
            w_star_band_error: None,
            poly: None,
        }
    }
}

/// One localization round: given `w_k` and the round parameters, return
/// `w_{k+1}` within angle `α_k` of `w_k`.
pub trait BandOracle: Sync {
    fn name(&self) -> &'static str;

    fn refine(
        &self,
        sampler: &mut dyn Sampler,
        w: &Hyperplane,
        round: &RoundParams,
        delta: f64,
    ) -> Result<BandStep>;
}

fn w_star_error(sampler: &dyn Sampler, samples: &[LabeledSample]) -> Option<f64> {
    sampler.w_star().map(|ws| {
        samples.iter().filter(|s| ws.predict(&s.x) != s.y).count() as f64 / samples.len() as f64
    })
}

fn hinge_in_cone(
    samples: &[LabeledSample],
    w: &Hyperplane,
    round: &RoundParams,
    config: &HingeConfig,
) -> Result<(Hyperplane, f64, Vec<f64>)> {
    let cone = ConeCap::new(w.clone(), round.alpha.min(FRAC_PI_2))?;
    let sol = minimize_hinge(
        &HingeProblem {
            samples,
            tau: round.tau,
            cone,
        },
        config,
    )?;
    let next = if geometry::norm(&sol.v) > ZERO_NORM {
        geometry::normalize(&sol.v)?
    } else {
        w.clone()
    };
    Ok((next, sol.objective, sol.v))
}

/// Hinge minimization on a band sample over the cone cap around `w_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HingeBandOracle {
    pub quota: usize,
    #[serde(default)]
    pub hinge: HingeConfig,
}

impl BandOracle for HingeBandOracle {
    fn name(&self) -> &'static str {
        "hinge"
    }

    fn refine(
        &self,
        sampler: &mut dyn Sampler,
        w: &Hyperplane,
        round: &RoundParams,
        _delta: f64,
    ) -> Result<BandStep> {
        let band = fill_band(sampler, w, round.gamma, self.quota)?;
        let (next, objective, _) = hinge_in_cone(&band.samples, w, round, &self.hinge)?;
        Ok(BandStep {
            w: next,
            band_samples: band.samples.len(),
            raw_draws: band.raw_draws,
            hinge_objective: Some(objective),
            w_star_band_error: w_star_error(sampler, &band.samples),
            poly: None,
        })
    }
}

fn default_degree() -> usize {
    3
}
fn default_g_scale() -> f64 {
    1.0
}

/// Polynomial regression on one band sample, then hinge minimization on a
/// second band sample relabeled by the polynomial threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyHingeBandOracle {
    pub quota: usize,
    #[serde(default = "default_degree")]
    pub degree: usize,
    pub nu: f64,
    #[serde(default)]
    pub hinge: HingeConfig,
    /// Scale of `g(z) = g_scale·z⁴`.
    #[serde(default = "default_g_scale")]
    pub g_scale: f64,
    /// `c₀` used for the logged target; set from the schedule.
    #[serde(default)]
    pub c0: f64,
}

impl PolyHingeBandOracle {
    pub fn g(&self, z: f64) -> f64 {
        self.g_scale * z.powi(4)
    }
}

impl BandOracle for PolyHingeBandOracle {
    fn name(&self) -> &'static str {
        "poly_hinge"
    }

    fn refine(
        &self,
        sampler: &mut dyn Sampler,
        w: &Hyperplane,
        round: &RoundParams,
        _delta: f64,
    ) -> Result<BandStep> {
        if !(0.0..0.5).contains(&self.nu) {
            return Err(Error::InvalidParameter(format!("nu must lie in [0,0.5), got {}", self.nu)));
        }
        let first = fill_band(sampler, w, round.gamma, self.quota)?;
        let d = sampler.dim();
        let fit = train_poly_regression(&crate::synthdata::Dataset::new(d, first.samples.clone())?, self.degree)?;
        let second = fill_band(sampler, w, round.gamma, self.quota)?;
        let pseudo: Vec<LabeledSample> = second
            .samples
            .iter()
            .map(|s| LabeledSample::new(s.x.clone(), fit.model.predict(&s.x)))
            .collect();
        let (next, objective, v) = hinge_in_cone(&pseudo, w, round, &self.hinge)?;
        let n2 = pseudo.len() as f64;
        let pseudo_disagreement = pseudo
            .iter()
            .filter(|s| Label::from_sign(geometry::dot(&v, &s.x)) != s.y)
            .count() as f64
            / n2;
        let pseudo_vs_w_star = w_star_error(sampler, &pseudo);
        Ok(BandStep {
            w: next,
            band_samples: first.samples.len() + second.samples.len(),
            raw_draws: first.raw_draws + second.raw_draws,
            hinge_objective: Some(objective),
            w_star_band_error: w_star_error(sampler, &first.samples),
            poly: Some(PolyStepInfo {
                train_error: fit.train_error,
                l1_error: fit.l1_error,
                excess_target: (1.0 - 2.0 * self.nu) * self.g(self.c0),
                pseudo_disagreement,
                pseudo_vs_w_star,
            }),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundDiagnostics {
    pub k: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub tau: f64,
    pub band_samples: usize,
    pub raw_draws: usize,
    pub hinge_objective: Option<f64>,
    /// Angle from `w_k` to `w_{k+1}`.
    pub step_angle: f64,
    /// Angles of `w_k` and `w_{k+1}` to `w*`.
    pub angle_before: Option<f64>,
    pub angle_after: Option<f64>,
    pub w_star_band_error: Option<f64>,
    /// `d²/(γ_k c₀²)·ln(r/δ)`, the unscaled per-round sample count of the analysis.
    pub theoretical_quota: f64,
    pub poly: Option<PolyStepInfo>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizationRun {
    pub w: Hyperplane,
    pub rounds: Vec<RoundDiagnostics>,
}

/// Margin-based localization from `w1` for `schedule.rounds` rounds.
///
/// Round `k` calls the oracle with `(w_k, γ_k, α_k, δ/r)`; the vector after
/// the last round is returned. Fails with `InvariantViolation` if an oracle
/// moves further than `α_k`.
pub fn localize(
    sampler: &mut dyn Sampler,
    schedule: &LocalizationSchedule,
    oracle: &dyn BandOracle,
    w1: &Hyperplane,
    delta: f64,
) -> Result<LocalizationRun> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta must lie in (0,1), got {delta}")));
    }
    geometry::check_dims(sampler.dim(), w1.dim())?;
    let r = schedule.rounds;
    let round_delta = delta / r as f64;
    let d = sampler.dim() as f64;
    let w_star = sampler.w_star().cloned();
    let mut w = w1.clone();
    let mut rounds = Vec::with_capacity(r);
    for k in 1..=r {
        let params = schedule.round(k);
        let step = oracle.refine(sampler, &w, &params, round_delta)?;
        let step_angle = geometry::angle(&w, &step.w);
        if step_angle > params.alpha + 1e-6 {
            return Err(Error::InvariantViolation(format!(
                "round {k}: oracle moved {step_angle} > alpha {}",
                params.alpha
            )));
        }
        rounds.push(RoundDiagnostics {
            k,
            alpha: params.alpha,
            gamma: params.gamma,
            tau: params.tau,
            band_samples: step.band_samples,
            raw_draws: step.raw_draws,
            hinge_objective: step.hinge_objective,
            step_angle,
            angle_before: w_star.as_ref().map(|ws| geometry::angle(&w, ws)),
            angle_after: w_star.as_ref().map(|ws| geometry::angle(&step.w, ws)),
            w_star_band_error: step.w_star_band_error,
            theoretical_quota: d * d / (params.gamma * schedule.c0 * schedule.c0)
                * (1.0 / round_delta).ln(),
            poly: step.poly,
        });
        w = step.w;
    }
    Ok(LocalizationRun { w, rounds })
}
