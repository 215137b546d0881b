use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, project_cone_cap, ConeCap, Label};
use crate::synthdata::LabeledSample;

/// `ℓ_τ(v, x, y) = max{0, 1 - y(v·x)/τ}`.
pub fn hinge_loss(v: &[f64], x: &[f64], y: Label, tau: f64) -> f64 {
    (1.0 - y.as_f64() * geometry::dot(v, x) / tau).max(0.0)
}

pub fn hinge_objective(v: &[f64], samples: &[LabeledSample], tau: f64) -> f64 {
    let total: f64 = samples.iter().map(|s| hinge_loss(v, &s.x, s.y, tau)).sum();
    total / samples.len() as f64
}

/// Empirical hinge minimization over a cone cap.
#[derive(Debug, Clone)]
pub struct HingeProblem<'a> {
    pub samples: &'a [LabeledSample],
    pub tau: f64,
    pub cone: ConeCap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HingeConfig {
    #[serde(default = "default_iters")]
    pub iters: usize,
    /// Diameter bound `R` in the step size `R/(G√t)`.
    #[serde(default = "default_step_radius")]
    pub step_radius: f64,
}

fn default_iters() -> usize {
    200
}

fn default_step_radius() -> f64 {
    1.0
}

impl Default for HingeConfig {
    fn default() -> Self {
        HingeConfig {
            iters: 200,
            step_radius: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HingeSolution {
    pub v: Vec<f64>,
    pub objective: f64,
}

/// Projected subgradient descent from the cone axis with steps
/// `η_t = R/(G√t)`, `G = max ‖x‖/τ`.
///
/// Every iterate and every tail average `mean(v_{⌊t/2⌋+1..t})` is a
/// candidate; the one with the smallest objective is returned. The candidate
/// set for a budget `T` is contained in the one for any larger budget, so the
/// returned objective never increases with `iters`, and it is never worse
/// than the averaged iterate the convergence bound is stated for.
pub fn minimize_hinge(problem: &HingeProblem<'_>, config: &HingeConfig) -> Result<HingeSolution> {
    let samples = problem.samples;
    if samples.is_empty() {
        return Err(Error::InvalidParameter("hinge problem has no samples".into()));
    }
    if !(problem.tau > 0.0 && problem.tau.is_finite()) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {}", problem.tau)));
    }
    if config.iters == 0 {
        return Err(Error::InvalidParameter("hinge minimization needs iters >= 1".into()));
    }
    let d = problem.cone.dim();
    for s in samples {
        geometry::check_dims(d, s.x.dim())?;
    }
    let n = samples.len();
    let tau = problem.tau;

    // z_i = y_i x_i / τ, so ℓ = max(0, 1 - v·z_i)
    let z: Vec<f64> = samples
        .iter()
        .flat_map(|s| {
            let scale = s.y.as_f64() / tau;
            s.x.iter().map(move |c| c * scale)
        })
        .collect();
    let objective = |v: &[f64]| -> f64 {
        z.chunks_exact(d)
            .map(|zi| (1.0 - geometry::dot(v, zi)).max(0.0))
            .sum::<f64>()
            / n as f64
    };
    let g_max = z
        .chunks_exact(d)
        .map(geometry::norm)
        .fold(0.0, f64::max);

    let mut v = problem.cone.axis().to_vec();
    let mut best = HingeSolution {
        objective: objective(&v),
        v: v.clone(),
    };
    let consider = |cand: &[f64], obj: f64, best: &mut HingeSolution| {
        if obj < best.objective {
            best.objective = obj;
            best.v = cand.to_vec();
        }
    };

    // prefix[t] = Σ_{s ≤ t} v_s, with v_1 the axis
    let mut prefix: Vec<Vec<f64>> = Vec::with_capacity(config.iters + 1);
    prefix.push(vec![0.0; d]);
    let mut grad = vec![0.0; d];
    for t in 1..=config.iters {
        let mut running = prefix[t - 1].clone();
        running.iter_mut().zip(&v).for_each(|(a, b)| *a += b);
        prefix.push(running);

        // tail average over (⌊t/2⌋, t]
        let h = t / 2;
        let avg: Vec<f64> = prefix[t]
            .iter()
            .zip(&prefix[h])
            .map(|(a, b)| (a - b) / (t - h) as f64)
            .collect();
        let avg = project_cone_cap(&avg, &problem.cone);
        let avg_obj = objective(&avg);
        consider(&avg, avg_obj, &mut best);

        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut loss = 0.0;
        for zi in z.chunks_exact(d) {
            let m = 1.0 - geometry::dot(&v, zi);
            if m > 0.0 {
                loss += m;
                grad.iter_mut().zip(zi).for_each(|(g, c)| *g -= c);
            }
        }
        consider(&v, loss / n as f64, &mut best);
        if g_max == 0.0 {
            break;
        }
        let eta = config.step_radius / (g_max * (t as f64).sqrt());
        let step: Vec<f64> = v
            .iter()
            .zip(&grad)
            .map(|(vi, gi)| vi - eta * gi / n as f64)
            .collect();
        v = project_cone_cap(&step, &problem.cone);
    }
    let final_obj = objective(&v);
    consider(&v, final_obj, &mut best);
    Ok(best)
}
