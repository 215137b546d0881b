use rayon::prelude::*;
use serde::Serialize;
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::evaluation::hoeffding_radius;
use crate::geometry::{self, Hyperplane, Instance};
use crate::learners::{band_mass_reference, ScheduleConstants};
use crate::synthdata::stream::derive_seed;
use crate::synthdata::{random_unit, sample_marginal, MarginalKind, MarginalSpec};

/// Checks on fewer points than this report a statistic but no verdict.
pub const UNDERPOWERED_BELOW: usize = 1000;

const TAIL_RADII: [f64; 3] = [1.5, 2.0, 3.0];
const DISAGREEMENT_PAIRS: u64 = 50;
const DISAGREEMENT_TOL: f64 = 0.005;
const BAND_GAMMAS: [f64; 3] = [0.05, 0.1, 0.3];
const WEDGE_ALPHAS: [f64; 2] = [0.05, 0.2];

const TAG_PAIR: u64 = 0x5041_4952;
const TAG_BAND: u64 = 0x4241_4e44;
const TAG_WEDGE: u64 = 0x5745_4447;
const TAG_PROJ: u64 = 0x5052_4f4a;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub name: String,
    pub statistic: f64,
    pub bound: f64,
    /// `None` when the check is underpowered.
    pub pass: Option<bool>,
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct PropertyReport {
    pub checks: Vec<PropertyCheck>,
}

impl PropertyReport {
    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&serde_json::to_string(c).expect("checks serialize"));
            out.push('\n');
        }
        out
    }

    /// True when no powered check failed.
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass != Some(false))
    }

    pub fn failures(&self) -> Vec<&PropertyCheck> {
        self.checks.iter().filter(|c| c.pass == Some(false)).collect()
    }

    pub fn is_underpowered(&self) -> bool {
        self.checks.iter().all(|c| c.pass.is_none())
    }

    pub fn get(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Exact mass of `{x : |w·x| ≤ γ}` under the marginal.
///
/// Gaussian: `2Φ(γ) − 1`. Uniform ball of radius `R` in `R^d`: the
/// projection has density `∝ (1 − t²/R²)^{(d−1)/2}`, so the mass is
/// `I_{γ²/R²}(1/2, (d+1)/2)`.
pub fn band_mass_exact(marginal: &MarginalSpec, gamma: f64) -> f64 {
    match marginal.kind {
        MarginalKind::Gaussian => band_mass_reference(gamma),
        MarginalKind::UniformBall => {
            let r = marginal.ball_radius();
            if gamma >= r {
                1.0
            } else {
                beta_reg(0.5, (marginal.d as f64 + 1.0) / 2.0, (gamma / r).powi(2))
            }
        }
    }
}

struct Builder {
    n: usize,
    seed: u64,
    checks: Vec<PropertyCheck>,
}

impl Builder {
    fn push(&mut self, name: String, statistic: f64, bound: f64) {
        self.push_powered(name, statistic, bound, true);
    }

    fn push_powered(&mut self, name: String, statistic: f64, bound: f64, powered: bool) {
        let pass = (powered && self.n >= UNDERPOWERED_BELOW).then_some(statistic <= bound);
        self.checks.push(PropertyCheck {
            name,
            statistic,
            bound,
            pass,
            n: self.n,
            seed: self.seed,
        });
    }
}

fn fraction(xs: &[Instance], pred: impl Fn(&Instance) -> bool + Sync) -> f64 {
    xs.par_iter().filter(|x| pred(x)).count() as f64 / xs.len() as f64
}

/// A unit vector at angle exactly `alpha` from `w`.
fn rotate_towards_random(w: &Hyperplane, alpha: f64, seed: u64) -> Hyperplane {
    let d = w.dim();
    if d == 1 {
        return w.clone();
    }
    let mut index = 0;
    loop {
        let u = random_unit(d, derive_seed(seed, TAG_WEDGE, index));
        let c = geometry::dot(&u, w);
        let perp: Vec<f64> = u.iter().zip(w.iter()).map(|(a, b)| a - c * b).collect();
        if let Ok(p) = geometry::normalize(&perp) {
            let v: Vec<f64> = w
                .iter()
                .zip(p.iter())
                .map(|(a, b)| alpha.cos() * a + alpha.sin() * b)
                .collect();
            return geometry::normalize(&v).expect("unit combination");
        }
        index += 1;
    }
}

/// The distributional checks on `n` draws of `marginal`.
pub fn check_logconcave_properties(marginal: &MarginalSpec, n: usize, seed: u64) -> Result<PropertyReport> {
    marginal.validate()?;
    let xs = sample_marginal(marginal, n, seed);
    check_points(&xs, marginal, seed)
}

/// The distributional checks on given points, with `reference` supplying
/// the expected band masses.
pub fn check_points(xs: &[Instance], reference: &MarginalSpec, seed: u64) -> Result<PropertyReport> {
    if xs.is_empty() {
        return Err(Error::InvalidParameter("property checks need n >= 1".into()));
    }
    let d = reference.d;
    for x in xs {
        geometry::check_dims(d, x.dim())?;
    }
    let n = xs.len();
    let nf = n as f64;
    let mut b = Builder {
        n,
        seed,
        checks: Vec::new(),
    };

    let sqrt_d = (d as f64).sqrt();
    for r in TAIL_RADII {
        let stat = fraction(xs, |x| geometry::norm(x) >= r * sqrt_d);
        b.push(format!("tail[r={r}]"), stat, (1.0 - r).exp());
    }

    for i in 0..DISAGREEMENT_PAIRS {
        let w = random_unit(d, derive_seed(seed, TAG_PAIR, 2 * i));
        let v = random_unit(d, derive_seed(seed, TAG_PAIR, 2 * i + 1));
        let theta = geometry::angle(&w, &v);
        let dis = fraction(xs, |x| {
            (geometry::dot(&w, x) >= 0.0) != (geometry::dot(&v, x) >= 0.0)
        });
        // a fixed two-sided tolerance means nothing below the sampling error
        b.push_powered(
            format!("disagreement[pair={i}]"),
            (dis - theta / std::f64::consts::PI).abs(),
            DISAGREEMENT_TOL,
            hoeffding_radius(n) <= DISAGREEMENT_TOL,
        );
    }

    for (j, gamma) in BAND_GAMMAS.into_iter().enumerate() {
        let w = random_unit(d, derive_seed(seed, TAG_BAND, j as u64));
        let mass = fraction(xs, |x| geometry::dot(&w, x).abs() <= gamma);
        let reference_mass = band_mass_exact(reference, gamma);
        let sigma = (reference_mass * (1.0 - reference_mass) / nf).sqrt();
        b.push(format!("band_mass[gamma={gamma}]"), (mass - reference_mass).abs(), 3.0 * sigma);
    }

    let consts = ScheduleConstants::default();
    let c3 = consts.c1_lower / 8.0;
    for (j, alpha) in WEDGE_ALPHAS.into_iter().enumerate() {
        let w = random_unit(d, derive_seed(seed, TAG_WEDGE, 1000 + j as u64));
        let v = rotate_towards_random(&w, alpha, derive_seed(seed, TAG_WEDGE, 2000 + j as u64));
        let stat = fraction(xs, |x| {
            let m = geometry::dot(&w, x);
            m.abs() >= consts.c3_prime * alpha && (m >= 0.0) != (geometry::dot(&v, x) >= 0.0)
        });
        b.push(format!("wedge[alpha={alpha}]"), stat, c3 * alpha);
    }

    // marginals of an isotropic distribution have unit variance
    let w = random_unit(d, derive_seed(seed, TAG_PROJ, 0));
    let (m2, m4) = xs
        .par_iter()
        .map(|x| {
            let t = geometry::dot(&w, x).powi(2);
            (t, t * t)
        })
        .reduce(|| (0.0, 0.0), |a, c| (a.0 + c.0, a.1 + c.1));
    let (m2, m4) = (m2 / nf, m4 / nf);
    let spread = ((m4 - m2 * m2).max(0.0) / nf).sqrt();
    b.push("projection_variance".to_string(), (m2 - 1.0).abs(), 3.0 * spread);

    Ok(PropertyReport { checks: b.checks })
}
