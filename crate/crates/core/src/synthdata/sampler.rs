use rand::Rng;

use super::stream::{Domain, StreamKey};
use super::{Dataset, LabeledSample, MarginalSpec, NoiseSpec};
use crate::error::{Error, Result};
use crate::geometry::{self, Hyperplane};

/// Sequential access to a labeled distribution.
pub trait Sampler {
    fn dim(&self) -> usize;

    fn draw(&mut self) -> LabeledSample;

    /// Ground truth, when the harness knows it.
    fn w_star(&self) -> Option<&Hyperplane> {
        None
    }

    /// Total draws so far.
    fn draws(&self) -> u64;

    fn draw_many(&mut self, n: usize) -> Vec<LabeledSample> {
        (0..n).map(|_| self.draw()).collect()
    }
}

/// Fresh i.i.d. draws from a marginal labeled by `w*` and corrupted by a
/// per-sample noise process. Item `i` equals item `i` of
/// [`generate`](super::generate) on the same arguments.
#[derive(Debug, Clone)]
pub struct StreamSampler {
    marginal: MarginalSpec,
    w_star: Hyperplane,
    noise: NoiseSpec,
    marginal_key: StreamKey,
    noise_key: StreamKey,
    cursor: u64,
}

impl StreamSampler {
    pub fn new(marginal: MarginalSpec, w_star: Hyperplane, noise: NoiseSpec, seed: u64) -> Result<StreamSampler> {
        marginal.validate()?;
        noise.validate()?;
        geometry::check_dims(marginal.d, w_star.dim())?;
        if !noise.is_per_sample() {
            return Err(Error::InvalidParameter(
                "stream sampling needs a per-sample noise kind (none, rcn, bounded)".into(),
            ));
        }
        Ok(StreamSampler {
            marginal,
            w_star,
            noise,
            marginal_key: StreamKey::new(seed, Domain::Marginal),
            noise_key: noise.stream_key(seed),
            cursor: 0,
        })
    }

    /// Moves the cursor, e.g. to skip past a prefix used for training.
    pub fn skip_to(&mut self, index: u64) {
        self.cursor = index;
    }
}

impl Sampler for StreamSampler {
    fn dim(&self) -> usize {
        self.marginal.d
    }

    fn draw(&mut self) -> LabeledSample {
        let i = self.cursor;
        self.cursor += 1;
        let x = self.marginal.draw(&self.marginal_key, i);
        let margin = geometry::dot(&self.w_star, &x);
        let clean = geometry::Label::from_sign(margin);
        let y = self.noise.corrupt_one(&self.noise_key, i, margin, clean);
        LabeledSample::new(x, y)
    }

    fn w_star(&self) -> Option<&Hyperplane> {
        Some(&self.w_star)
    }

    fn draws(&self) -> u64 {
        self.cursor
    }
}

/// Uniform draws with replacement from a fixed dataset, i.e. sampling the
/// empirical distribution. Used when the corruption is defined on a whole
/// dataset (adversarial flips, malicious replacement).
#[derive(Debug, Clone)]
pub struct PoolSampler {
    pool: Dataset,
    w_star: Option<Hyperplane>,
    key: StreamKey,
    cursor: u64,
}

impl PoolSampler {
    pub fn new(pool: Dataset, seed: u64) -> Result<PoolSampler> {
        if pool.is_empty() {
            return Err(Error::InvalidParameter("cannot sample from an empty pool".into()));
        }
        let w_star = pool.provenance().w_star.clone();
        Ok(PoolSampler {
            pool,
            w_star,
            key: StreamKey::new(seed, Domain::Pool),
            cursor: 0,
        })
    }
}

impl Sampler for PoolSampler {
    fn dim(&self) -> usize {
        self.pool.dim()
    }

    fn draw(&mut self) -> LabeledSample {
        let i = self.key.rng(self.cursor).random_range(0..self.pool.len());
        self.cursor += 1;
        self.pool.samples()[i].clone()
    }

    fn w_star(&self) -> Option<&Hyperplane> {
        self.w_star.as_ref()
    }

    fn draws(&self) -> u64 {
        self.cursor
    }
}
