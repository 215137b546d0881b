use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Hyperplane;
use crate::learners::{train_lp_realizable, Classifier};
use crate::synthdata::{Dataset, LabeledSample, Sampler};

/// `⌈(4/ε)(d ln(12/ε) + ln(2/δ))⌉`
pub fn realizable_sample_bound(d: usize, epsilon: f64, delta: f64) -> Result<usize> {
    check_unit("epsilon", epsilon)?;
    check_unit("delta", delta)?;
    let m = (4.0 / epsilon) * (d as f64 * (12.0 / epsilon).ln() + (2.0 / delta).ln());
    Ok(m.ceil() as usize)
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must lie in (0,1), got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KearnsLiConfig {
    pub epsilon: f64,
    pub delta: f64,
    #[serde(default = "default_cap")]
    pub repetition_cap: usize,
}

fn default_cap() -> usize {
    2000
}

impl KearnsLiConfig {
    pub fn new(epsilon: f64, delta: f64) -> Self {
        KearnsLiConfig {
            epsilon,
            delta,
            repetition_cap: default_cap(),
        }
    }
}

/// Sample and repetition counts of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KearnsLiPlan {
    /// Size of each oracle sample.
    pub m: usize,
    /// `m² ln(2/δ)` before capping.
    pub r_uncapped: f64,
    pub r: usize,
    pub m_validation: usize,
}

impl KearnsLiPlan {
    pub fn new(d: usize, config: &KearnsLiConfig) -> Result<Self> {
        let m = realizable_sample_bound(d, config.epsilon / 4.0, 0.5)?;
        check_unit("delta", config.delta)?;
        if config.repetition_cap == 0 {
            return Err(Error::InvalidParameter("repetition_cap must be >= 1".into()));
        }
        let r_uncapped = (m as f64).powi(2) * (2.0 / config.delta).ln();
        let r = if r_uncapped < config.repetition_cap as f64 {
            r_uncapped.ceil().max(1.0) as usize
        } else {
            config.repetition_cap
        };
        let m_validation = ((r as f64 / config.delta).ln() / config.epsilon).ceil().max(1.0) as usize;
        Ok(KearnsLiPlan {
            m,
            r_uncapped,
            r,
            m_validation,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KearnsLiOutcome {
    pub model: Hyperplane,
    #[serde(flatten)]
    pub plan: KearnsLiPlan,
    pub candidates: usize,
    pub validation_error: f64,
    /// Index of the chosen oracle call.
    pub chosen: usize,
}

const BATCH: usize = 64;

/// Repeated realizable-oracle calls on fresh samples, then validation.
///
/// Sample sets are drawn from `sampler` in order (set `i` is draws
/// `i·m .. (i+1)·m`), followed by the validation block, so the result depends
/// only on the sampler state. Oracle calls within a batch run in parallel.
pub fn train_kearns_li(sampler: &mut dyn Sampler, config: &KearnsLiConfig) -> Result<KearnsLiOutcome> {
    let d = sampler.dim();
    let plan = KearnsLiPlan::new(d, config)?;
    let (m, r) = (plan.m, plan.r);

    let mut candidates: Vec<(usize, Hyperplane)> = Vec::new();
    let mut done = 0;
    while done < r {
        let batch = BATCH.min(r - done);
        let sets: Vec<Vec<LabeledSample>> = (0..batch).map(|_| sampler.draw_many(m)).collect();
        let results: Vec<Result<Option<Hyperplane>>> = sets
            .into_par_iter()
            .map(|set| train_lp_realizable(&Dataset::new(d, set)?))
            .collect();
        for (j, res) in results.into_iter().enumerate() {
            if let Some(w) = res? {
                candidates.push((done + j, w));
            }
        }
        done += batch;
    }

    let validation = sampler.draw_many(plan.m_validation);
    if candidates.is_empty() {
        return Err(Error::NoCandidate);
    }
    let errors: Vec<usize> = candidates
        .par_iter()
        .map(|(_, w)| validation.iter().filter(|s| w.predict(&s.x) != s.y).count())
        .collect();
    // first minimum, so ties go to the earliest oracle call
    let (best, &errs) = errors
        .iter()
        .enumerate()
        .min_by_key(|&(_, e)| *e)
        .expect("nonempty");
    let (chosen, model) = candidates.swap_remove(best);
    Ok(KearnsLiOutcome {
        model,
        plan,
        candidates: errors.len(),
        validation_error: errs as f64 / plan.m_validation as f64,
        chosen,
    })
}
