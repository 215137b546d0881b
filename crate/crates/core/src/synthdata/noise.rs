use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::stream::{Domain, StreamKey};
use super::{Dataset, LabeledSample};
use crate::error::{Error, Result};
use crate::geometry::{self, Hyperplane, Instance, Label};

/// Half-width of the reference band that `boundary_cluster` fakes sit just
/// outside of.
pub const BOUNDARY_CLUSTER_BAND: f64 = 0.1;

/// Instance-dependent flip rate for bounded noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RateFn {
    /// `ν` everywhere.
    #[default]
    Constant,
    /// `ν·exp(-|w*·x|/σ)`.
    MarginDecay { sigma: f64 },
}

impl RateFn {
    pub fn rate(&self, nu: f64, margin: f64) -> f64 {
        match *self {
            RateFn::Constant => nu,
            RateFn::MarginDecay { sigma } => nu * (-margin.abs() / sigma).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversarialStrategy {
    NearestBoundary,
    OrthogonalBias,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaliciousStrategy {
    OrthogonalCluster,
    BoundaryCluster,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseSpec {
    #[default]
    None,
    Rcn {
        nu: f64,
    },
    Bounded {
        nu: f64,
        #[serde(default)]
        rate_fn: RateFn,
    },
    AdversarialFlip {
        budget: f64,
        strategy: AdversarialStrategy,
    },
    Malicious {
        budget: f64,
        strategy: MaliciousStrategy,
    },
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        let check_nu = |nu: f64| {
            if (0.0..0.5).contains(&nu) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("noise rate nu must lie in [0, 0.5), got {nu}")))
            }
        };
        let check_budget = |b: f64| {
            if (0.0..1.0).contains(&b) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("budget must lie in [0, 1), got {b}")))
            }
        };
        match *self {
            NoiseSpec::None => Ok(()),
            NoiseSpec::Rcn { nu } => check_nu(nu),
            NoiseSpec::Bounded { nu, rate_fn } => {
                check_nu(nu)?;
                if let RateFn::MarginDecay { sigma } = rate_fn {
                    if !(sigma > 0.0 && sigma.is_finite()) {
                        return Err(Error::InvalidParameter(format!(
                            "margin_decay sigma must be positive, got {sigma}"
                        )));
                    }
                }
                Ok(())
            }
            NoiseSpec::AdversarialFlip { budget, .. } | NoiseSpec::Malicious { budget, .. } => {
                check_budget(budget)
            }
        }
    }

    /// Whether the corruption acts on each sample independently (and can
    /// therefore be applied to an unbounded stream).
    pub fn is_per_sample(&self) -> bool {
        matches!(
            self,
            NoiseSpec::None | NoiseSpec::Rcn { .. } | NoiseSpec::Bounded { .. }
        )
    }

    /// Flip probability of a per-sample kind at margin `w*·x`.
    pub(crate) fn flip_rate(&self, margin: f64) -> Option<f64> {
        match *self {
            NoiseSpec::None => Some(0.0),
            NoiseSpec::Rcn { nu } => Some(nu),
            NoiseSpec::Bounded { nu, rate_fn } => Some(rate_fn.rate(nu, margin)),
            _ => None,
        }
    }

    fn domain(&self) -> Domain {
        match self {
            NoiseSpec::Bounded { .. } => Domain::Bounded,
            NoiseSpec::AdversarialFlip { .. } => Domain::Adversarial,
            NoiseSpec::Malicious { .. } => Domain::Malicious,
            _ => Domain::Rcn,
        }
    }

    /// Label of stream item `index` after per-sample corruption.
    pub(crate) fn corrupt_one(&self, key: &StreamKey, index: u64, margin: f64, clean: Label) -> Label {
        let rate = self.flip_rate(margin).unwrap_or(0.0);
        if rate <= 0.0 {
            return clean;
        }
        let u: f64 = key.rng(index).random();
        if u < rate {
            clean.flip()
        } else {
            clean
        }
    }

    pub(crate) fn stream_key(&self, seed: u64) -> StreamKey {
        StreamKey::new(seed, self.domain())
    }
}

pub fn apply_noise(s: &Dataset, w_star: &Hyperplane, noise: &NoiseSpec, seed: u64) -> Result<Dataset> {
    noise.validate()?;
    match *noise {
        NoiseSpec::None => Ok(s.clone()),
        NoiseSpec::Rcn { nu } => apply_rcn(s, nu, seed),
        NoiseSpec::Bounded { nu, rate_fn } => apply_bounded(s, w_star, nu, rate_fn, seed),
        NoiseSpec::AdversarialFlip { budget, strategy } => {
            apply_adversarial_flip(s, w_star, budget, strategy, seed)
        }
        NoiseSpec::Malicious { budget, strategy } => apply_malicious(s, w_star, budget, strategy, seed),
    }
}

fn per_sample(s: &Dataset, w_star: Option<&Hyperplane>, spec: NoiseSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let key = spec.stream_key(seed);
    let samples = s
        .iter()
        .enumerate()
        .map(|(i, smp)| {
            let margin = match w_star {
                Some(w) => w.margin(&smp.x)?,
                None => 0.0,
            };
            Ok(LabeledSample::new(
                smp.x.clone(),
                spec.corrupt_one(&key, i as u64, margin, smp.y),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(s.with_samples(samples, spec, seed))
}

/// Flips every label independently with probability `nu`.
pub fn apply_rcn(s: &Dataset, nu: f64, seed: u64) -> Result<Dataset> {
    per_sample(s, None, NoiseSpec::Rcn { nu }, seed)
}

/// Flips the label of `x` independently with probability `rate_fn(x) ≤ ν`.
pub fn apply_bounded(s: &Dataset, w_star: &Hyperplane, nu: f64, rate_fn: RateFn, seed: u64) -> Result<Dataset> {
    geometry::check_dims(s.dim(), w_star.dim())?;
    per_sample(s, Some(w_star), NoiseSpec::Bounded { nu, rate_fn }, seed)
}

fn corruption_count(budget: f64, n: usize) -> usize {
    (budget * n as f64).floor() as usize
}

/// Seeded uniform choice of `k` distinct indices out of `n` (partial
/// Fisher–Yates).
fn choose_indices(n: usize, k: usize, key: &StreamKey) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = key.rng(0);
    for i in 0..k.min(n) {
        let j = rng.random_range(i..n);
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx
}

/// A unit vector orthogonal to `w_star`, or zero when `d = 1`.
fn orthogonal_direction(w_star: &Hyperplane, key: &StreamKey) -> Vec<f64> {
    let d = w_star.dim();
    if d == 1 {
        return vec![0.0];
    }
    let mut index = 1u64;
    loop {
        let mut rng = key.rng(index);
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let along = geometry::dot(&v, w_star);
        v.iter_mut().zip(w_star.iter()).for_each(|(vi, wi)| *vi -= along * wi);
        if let Ok(u) = geometry::normalize(&v) {
            return u.into_vec();
        }
        index += 1;
    }
}

/// Flips exactly `⌊budget·n⌋` labels chosen by `strategy`.
pub fn apply_adversarial_flip(
    s: &Dataset,
    w_star: &Hyperplane,
    budget: f64,
    strategy: AdversarialStrategy,
    seed: u64,
) -> Result<Dataset> {
    let spec = NoiseSpec::AdversarialFlip { budget, strategy };
    spec.validate()?;
    geometry::check_dims(s.dim(), w_star.dim())?;
    let n = s.len();
    let k = corruption_count(budget, n);
    let key = spec.stream_key(seed);
    let margins: Vec<f64> = s.iter().map(|smp| geometry::dot(w_star, &smp.x)).collect();

    let chosen: Vec<usize> = match strategy {
        AdversarialStrategy::NearestBoundary => {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| margins[a].abs().total_cmp(&margins[b].abs()).then(a.cmp(&b)));
            order.truncate(k);
            order
        }
        AdversarialStrategy::OrthogonalBias => {
            let u = orthogonal_direction(w_star, &key);
            let proj: Vec<f64> = s.iter().map(|smp| geometry::dot(&u, &smp.x)).collect();
            // correctly labeled points on the side of u that the flip turns
            // into a bias along u, then other correct points, then the rest
            let tier = |i: usize| {
                let smp = &s.samples()[i];
                let correct = Label::from_sign(margins[i]) == smp.y;
                let biasing = smp.y.as_f64() * proj[i] < 0.0;
                match (correct, biasing) {
                    (true, true) => 0,
                    (true, false) => 1,
                    _ => 2,
                }
            };
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| {
                tier(a)
                    .cmp(&tier(b))
                    .then(proj[b].abs().total_cmp(&proj[a].abs()))
                    .then(a.cmp(&b))
            });
            order.truncate(k);
            order
        }
        AdversarialStrategy::Random => choose_indices(n, k, &key),
    };

    let mut samples = s.samples().to_vec();
    for i in chosen {
        samples[i].y = samples[i].y.flip();
    }
    Ok(s.with_samples(samples, spec, seed))
}

/// Replaces exactly `⌊budget·n⌋` uniformly chosen samples by adversarial
/// fakes.
pub fn apply_malicious(
    s: &Dataset,
    w_star: &Hyperplane,
    budget: f64,
    strategy: MaliciousStrategy,
    seed: u64,
) -> Result<Dataset> {
    let spec = NoiseSpec::Malicious { budget, strategy };
    spec.validate()?;
    geometry::check_dims(s.dim(), w_star.dim())?;
    let n = s.len();
    let d = s.dim();
    let k = corruption_count(budget, n);
    let key = spec.stream_key(seed);
    let u = orthogonal_direction(w_star, &key);
    let reach = (d as f64).sqrt();

    let fake = match strategy {
        MaliciousStrategy::OrthogonalCluster => {
            let x: Vec<f64> = u.iter().map(|c| reach * c).collect();
            let y = Label::from_sign(geometry::dot(w_star, &x)).flip();
            LabeledSample::new(Instance::from_vec_unchecked(x), y)
        }
        MaliciousStrategy::BoundaryCluster => {
            let offset = 1.05 * BOUNDARY_CLUSTER_BAND;
            let x: Vec<f64> = w_star
                .iter()
                .zip(&u)
                .map(|(wi, ui)| offset * wi + reach * ui)
                .collect();
            LabeledSample::new(Instance::from_vec_unchecked(x), Label::Neg)
        }
    };

    let mut samples = s.samples().to_vec();
    for i in choose_indices(n, k, &key) {
        samples[i] = fake.clone();
    }
    Ok(s.with_samples(samples, spec, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthdata::{generate, label_realizable, sample_marginal, MarginalSpec};

    fn realizable(d: usize, n: usize, seed: u64) -> (Dataset, Hyperplane) {
        let w = crate::synthdata::random_unit(d, seed + 1000);
        let xs = sample_marginal(&MarginalSpec::gaussian(d), n, seed);
        (label_realizable(&xs, &w).unwrap(), w)
    }

    fn flipped(a: &Dataset, b: &Dataset) -> usize {
        a.iter().zip(b.iter()).filter(|(p, q)| p.y != q.y).count()
    }

    #[test]
    fn zero_rates_are_identity() {
        let (s, w) = realizable(3, 500, 1);
        assert_eq!(apply_rcn(&s, 0.0, 4).unwrap().samples(), s.samples());
        assert_eq!(
            apply_bounded(&s, &w, 0.0, RateFn::Constant, 4).unwrap().samples(),
            s.samples()
        );
        for strat in [
            AdversarialStrategy::NearestBoundary,
            AdversarialStrategy::OrthogonalBias,
            AdversarialStrategy::Random,
        ] {
            assert_eq!(apply_adversarial_flip(&s, &w, 0.0, strat, 4).unwrap().samples(), s.samples());
        }
        assert_eq!(
            apply_malicious(&s, &w, 0.0, MaliciousStrategy::OrthogonalCluster, 4)
                .unwrap()
                .samples(),
            s.samples()
        );
    }

    #[test]
    fn rcn_then_zero_rcn_is_rcn() {
        let (s, _) = realizable(3, 500, 2);
        let once = apply_rcn(&s, 0.3, 8).unwrap();
        let twice = apply_rcn(&once, 0.0, 9).unwrap();
        assert_eq!(once.samples(), twice.samples());
        assert_eq!(once.provenance().noise.len(), 1);
    }

    #[test]
    fn exact_adversarial_counts() {
        let (s, w) = realizable(4, 1003, 3);
        for strat in [
            AdversarialStrategy::NearestBoundary,
            AdversarialStrategy::OrthogonalBias,
            AdversarialStrategy::Random,
        ] {
            for budget in [0.01, 0.05, 0.37] {
                let c = apply_adversarial_flip(&s, &w, budget, strat, 5).unwrap();
                assert_eq!(flipped(&s, &c), (budget * 1003.0).floor() as usize);
            }
        }
    }

    #[test]
    fn nearest_boundary_error_is_exact() {
        let (s, w) = realizable(5, 2000, 4);
        let c = apply_adversarial_flip(&s, &w, 0.05, AdversarialStrategy::NearestBoundary, 0).unwrap();
        let wrong = c.iter().filter(|smp| w.classify(&smp.x).unwrap() != smp.y).count();
        assert_eq!(wrong, 100);
        let max_flipped = s
            .iter()
            .zip(c.iter())
            .filter(|(a, b)| a.y != b.y)
            .map(|(a, _)| geometry::dot(&w, &a.x).abs())
            .fold(0.0, f64::max);
        let min_kept = s
            .iter()
            .zip(c.iter())
            .filter(|(a, b)| a.y == b.y)
            .map(|(a, _)| geometry::dot(&w, &a.x).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(max_flipped <= min_kept);
    }

    #[test]
    fn exact_malicious_counts() {
        let (s, w) = realizable(6, 777, 5);
        for strat in [MaliciousStrategy::OrthogonalCluster, MaliciousStrategy::BoundaryCluster] {
            let c = apply_malicious(&s, &w, 0.1, strat, 6).unwrap();
            let replaced = s.iter().zip(c.iter()).filter(|(a, b)| a != b).count();
            assert_eq!(replaced, 77);
        }
    }

    #[test]
    fn orthogonal_cluster_fakes_are_orthogonal_and_mislabeled() {
        let (s, w) = realizable(6, 200, 7);
        let c = apply_malicious(&s, &w, 0.2, MaliciousStrategy::OrthogonalCluster, 1).unwrap();
        for (a, b) in s.iter().zip(c.iter()).filter(|(a, b)| a != b) {
            let _ = a;
            assert!(geometry::dot(&w, &b.x).abs() < 1e-12);
            assert_eq!(b.y, Label::Neg);
            assert!((geometry::norm(&b.x) - 6f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_parameters() {
        let (s, w) = realizable(2, 10, 1);
        assert!(apply_rcn(&s, 0.5, 0).is_err());
        assert!(apply_bounded(&s, &w, -0.1, RateFn::Constant, 0).is_err());
        assert!(apply_adversarial_flip(&s, &w, 1.0, AdversarialStrategy::Random, 0).is_err());
    }

    #[test]
    fn generate_matches_manual_pipeline() {
        let spec = MarginalSpec::gaussian(3);
        let w = crate::synthdata::random_unit(3, 11);
        let noise = NoiseSpec::Rcn { nu: 0.2 };
        let a = generate(&spec, &w, &noise, 300, 21).unwrap();
        let xs = sample_marginal(&spec, 300, 21);
        let b = apply_rcn(&label_realizable(&xs, &w).unwrap(), 0.2, 21).unwrap();
        assert_eq!(a.samples(), b.samples());
    }

    #[test]
    fn noise_spec_json() {
        let n: NoiseSpec =
            serde_json::from_str(r#"{"kind":"bounded","nu":0.2,"rate_fn":{"kind":"margin_decay","sigma":0.5}}"#)
                .unwrap();
        assert_eq!(
            n,
            NoiseSpec::Bounded {
                nu: 0.2,
                rate_fn: RateFn::MarginDecay { sigma: 0.5 }
            }
        );
        assert!(serde_json::from_str::<NoiseSpec>(r#"{"kind":"rcn","nu":0.2,"extra":1}"#).is_err());
    }
}
