//! Error metrics, Monte Carlo estimates and the distributional checks.

mod properties;
mod sandwich;

pub use properties::{
    band_mass_exact, check_logconcave_properties, check_points, PropertyCheck, PropertyReport,
    UNDERPOWERED_BELOW,
};
pub use sandwich::{check_excess_sandwich, check_excess_sandwich_with_labels};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{self, Hyperplane, Instance};
use crate::learners::Classifier;
use crate::synthdata::{generate, Dataset, MarginalSpec, NoiseSpec};

/// `√(ln(2/0.05) / (2n))`, the two-sided 95% Hoeffding radius.
pub fn hoeffding_radius(n: usize) -> f64 {
    ((2.0f64 / 0.05).ln() / (2.0 * n as f64)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorEstimate {
    pub value: f64,
    pub n: usize,
    pub ci_radius: f64,
}

impl ErrorEstimate {
    pub fn from_count(errors: usize, n: usize) -> Self {
        ErrorEstimate {
            value: errors as f64 / n as f64,
            n,
            ci_radius: hoeffding_radius(n),
        }
    }

    pub fn contains(&self, truth: f64) -> bool {
        (self.value - truth).abs() <= self.ci_radius
    }
}

fn check_classifier<C: Classifier + ?Sized>(f: &C, d: usize) -> Result<()> {
    geometry::check_dims(d, f.dim())
}

/// Fraction of samples of `s` that `f` mislabels.
pub fn empirical_error<C: Classifier + ?Sized>(f: &C, s: &Dataset) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::InvalidParameter("empirical_error needs a nonempty sample".into()));
    }
    check_classifier(f, s.dim())?;
    let wrong = s
        .samples()
        .par_iter()
        .filter(|smp| f.predict(&smp.x) != smp.y)
        .count();
    Ok(wrong as f64 / s.len() as f64)
}

/// Error of `f` on `n` fresh samples from the data model.
///
/// Dataset-level noise (adversarial flips, malicious replacement) is applied
/// to the evaluation sample with its exact budget.
pub fn mc_error<C: Classifier + ?Sized>(
    f: &C,
    marginal: &MarginalSpec,
    w_star: &Hyperplane,
    noise: &NoiseSpec,
    n: usize,
    seed: u64,
) -> Result<ErrorEstimate> {
    if n == 0 {
        return Err(Error::InvalidParameter("mc_error needs n >= 1".into()));
    }
    check_classifier(f, marginal.d)?;
    let s = generate(marginal, w_star, noise, n, seed)?;
    let wrong = s
        .samples()
        .par_iter()
        .filter(|smp| f.predict(&smp.x) != smp.y)
        .count();
    Ok(ErrorEstimate::from_count(wrong, n))
}

/// Fraction of `xs` on which `f` and `g` disagree.
pub fn disagreement<F, G>(f: &F, g: &G, xs: &[Instance]) -> Result<f64>
where
    F: Classifier + ?Sized,
    G: Classifier + ?Sized,
{
    if xs.is_empty() {
        return Err(Error::InvalidParameter("disagreement needs a nonempty sample".into()));
    }
    check_classifier(f, xs[0].dim())?;
    check_classifier(g, xs[0].dim())?;
    let n = xs
        .par_iter()
        .filter(|x| f.predict(x) != g.predict(x))
        .count();
    Ok(n as f64 / xs.len() as f64)
}
