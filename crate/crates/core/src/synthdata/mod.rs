//! Seeded synthetic data: isotropic log-concave marginals, realizable
//! labeling by a ground-truth halfspace, and label/sample corruption.

mod csv;
mod noise;
mod sampler;
pub mod stream;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, Hyperplane, Instance, Label};

pub use self::csv::{read_csv, write_csv};
pub(crate) use self::csv::fmt_f64;
pub use self::noise::{
    apply_adversarial_flip, apply_bounded, apply_malicious, apply_noise, apply_rcn,
    AdversarialStrategy, MaliciousStrategy, NoiseSpec, RateFn, BOUNDARY_CLUSTER_BAND,
};
pub use self::sampler::{PoolSampler, Sampler, StreamSampler};
use self::stream::{Domain, StreamKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginalKind {
    /// Standard normal in every coordinate.
    Gaussian,
    /// Uniform on the ball of radius `√(d+2)`, which has identity covariance.
    UniformBall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginalSpec {
    pub kind: MarginalKind,
    pub d: usize,
}

impl MarginalSpec {
    pub fn gaussian(d: usize) -> MarginalSpec {
        MarginalSpec {
            kind: MarginalKind::Gaussian,
            d,
        }
    }

    pub fn uniform_ball(d: usize) -> MarginalSpec {
        MarginalSpec {
            kind: MarginalKind::UniformBall,
            d,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::InvalidParameter("marginal dimension d must be >= 1".into()));
        }
        Ok(())
    }

    /// Radius of the support for bounded marginals.
    pub fn ball_radius(&self) -> f64 {
        ((self.d + 2) as f64).sqrt()
    }

    /// Draw number `index` of the stream keyed by `seed`.
    pub fn draw(&self, key: &StreamKey, index: u64) -> Instance {
        let mut rng = key.rng(index);
        let d = self.d;
        let mut coords: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        if self.kind == MarginalKind::UniformBall {
            let n = geometry::norm(&coords);
            // radius density ∝ r^{d-1} on [0, 1]
            let u: f64 = rng.random();
            let r = u.powf(1.0 / d as f64) * self.ball_radius();
            let scale = if n > 0.0 { r / n } else { 0.0 };
            coords.iter_mut().for_each(|c| *c *= scale);
        }
        Instance::from_vec_unchecked(coords)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub x: Instance,
    pub y: Label,
}

impl LabeledSample {
    pub fn new(x: Instance, y: Label) -> LabeledSample {
        LabeledSample { x, y }
    }
}

/// Where a dataset came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Provenance {
    pub marginal: Option<MarginalSpec>,
    pub w_star: Option<Hyperplane>,
    /// Corruptions in the order they were applied.
    pub noise: Vec<NoiseSpec>,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<LabeledSample>,
    d: usize,
    provenance: Provenance,
}

impl Dataset {
    pub fn new(d: usize, samples: Vec<LabeledSample>) -> Result<Dataset> {
        if d == 0 {
            return Err(Error::InvalidParameter("dataset dimension d must be >= 1".into()));
        }
        for s in &samples {
            geometry::check_dims(d, s.x.dim())?;
        }
        Ok(Dataset {
            samples,
            d,
            provenance: Provenance::default(),
        })
    }

    /// Builds a dataset from `(coords, ±1)` pairs.
    pub fn from_pairs(d: usize, pairs: &[(Vec<f64>, i8)]) -> Result<Dataset> {
        let samples = pairs
            .iter()
            .map(|(x, y)| {
                let y = Label::from_i8(*y)
                    .ok_or_else(|| Error::InvalidParameter(format!("label {y} not in {{-1, 1}}")))?;
                Ok(LabeledSample::new(Instance::new(x.clone())?, y))
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(d, samples)
    }

    pub(crate) fn from_parts(d: usize, samples: Vec<LabeledSample>, provenance: Provenance) -> Dataset {
        Dataset {
            samples,
            d,
            provenance,
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LabeledSample> {
        self.samples.iter()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn instances(&self) -> Vec<Instance> {
        self.samples.iter().map(|s| s.x.clone()).collect()
    }

    pub fn into_samples(self) -> Vec<LabeledSample> {
        self.samples
    }

    pub(crate) fn with_samples(&self, samples: Vec<LabeledSample>, noise: NoiseSpec, seed: u64) -> Dataset {
        let mut provenance = self.provenance.clone();
        provenance.noise.push(noise);
        provenance.seeds.push(seed);
        Dataset {
            samples,
            d: self.d,
            provenance,
        }
    }
}

/// `n` i.i.d. draws from the marginal. Draw `i` depends only on
/// `(spec, seed, i)`.
pub fn sample_marginal(spec: &MarginalSpec, n: usize, seed: u64) -> Vec<Instance> {
    let key = StreamKey::new(seed, Domain::Marginal);
    (0..n as u64)
        .into_par_iter()
        .map(|i| spec.draw(&key, i))
        .collect()
}

pub fn label_realizable(xs: &[Instance], w_star: &Hyperplane) -> Result<Dataset> {
    let samples = xs
        .iter()
        .map(|x| Ok(LabeledSample::new(x.clone(), w_star.classify(x)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Dataset::from_parts(
        w_star.dim(),
        samples,
        Provenance {
            w_star: Some(w_star.clone()),
            ..Provenance::default()
        },
    ))
}

/// A uniformly random unit vector in `R^d`, keyed by `seed`.
pub fn random_unit(d: usize, seed: u64) -> Hyperplane {
    let key = StreamKey::new(seed, Domain::Direction);
    let mut index = 0u64;
    loop {
        let mut rng = key.rng(index);
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok(h) = geometry::normalize(&v) {
            return h;
        }
        index += 1;
    }
}

/// Realizable sample of size `n` labeled by `w_star`, then corrupted by
/// `noise`. Per-sample noise kinds agree draw-for-draw with
/// [`StreamSampler`] on the same arguments.
pub fn generate(
    marginal: &MarginalSpec,
    w_star: &Hyperplane,
    noise: &NoiseSpec,
    n: usize,
    seed: u64,
) -> Result<Dataset> {
    marginal.validate()?;
    geometry::check_dims(marginal.d, w_star.dim())?;
    noise.validate()?;
    let xs = sample_marginal(marginal, n, seed);
    let mut clean = label_realizable(&xs, w_star)?;
    clean.provenance.marginal = Some(*marginal);
    clean.provenance.seeds.push(seed);
    apply_noise(&clean, w_star, noise, seed)
}
