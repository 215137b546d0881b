use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evaluation::{hoeffding_radius, PropertyCheck, PropertyReport, UNDERPOWERED_BELOW};
use crate::geometry::{self, Hyperplane};
use crate::learners::Classifier;
use crate::synthdata::{generate, Dataset, MarginalSpec, NoiseSpec, RateFn};

/// Checks `(1−2ν)·dis ≤ excess ≤ dis` and `E[(excess per sample)²] = dis`
/// on one shared stream of `n` bounded-noise samples, each within three
/// Hoeffding radii.
pub fn check_excess_sandwich<C: Classifier + ?Sized>(
    h: &C,
    w_star: &Hyperplane,
    nu: f64,
    marginal: &MarginalSpec,
    rate_fn: RateFn,
    n: usize,
    seed: u64,
) -> Result<PropertyReport> {
    let noise = NoiseSpec::Bounded { nu, rate_fn };
    let s = generate(marginal, w_star, &noise, n, seed)?;
    check_excess_sandwich_with_labels(h, w_star, nu, &s, seed)
}

/// The sandwich checks on an explicit labeled sample, whatever process
/// produced its labels.
pub fn check_excess_sandwich_with_labels<C: Classifier + ?Sized>(
    h: &C,
    w_star: &Hyperplane,
    nu: f64,
    s: &Dataset,
    seed: u64,
) -> Result<PropertyReport> {
    if !(0.0..0.5).contains(&nu) {
        return Err(Error::InvalidParameter(format!("nu must lie in [0,0.5), got {nu}")));
    }
    if s.is_empty() {
        return Err(Error::InvalidParameter("sandwich check needs n >= 1".into()));
    }
    geometry::check_dims(s.dim(), w_star.dim())?;
    geometry::check_dims(s.dim(), h.dim())?;
    let n = s.len();
    // (Σ excess, Σ excess², Σ disagreement)
    let (ex, ex2, dis) = s
        .samples()
        .par_iter()
        .map(|smp| {
            let hp = h.predict(&smp.x);
            let sp = w_star.predict(&smp.x);
            let e = f64::from(u8::from(hp != smp.y)) - f64::from(u8::from(sp != smp.y));
            (e, e * e, f64::from(u8::from(hp != sp)))
        })
        .reduce(|| (0.0, 0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let nf = n as f64;
    let (excess, second, dis) = (ex / nf, ex2 / nf, dis / nf);
    let slack = 3.0 * hoeffding_radius(n);
    let powered = n >= UNDERPOWERED_BELOW;
    let check = |name: &str, statistic: f64| PropertyCheck {
        name: name.to_string(),
        statistic,
        bound: slack,
        pass: powered.then_some(statistic <= slack),
        n,
        seed,
    };
    Ok(PropertyReport {
        checks: vec![
            check("excess_lower", (1.0 - 2.0 * nu) * dis - excess),
            check("excess_upper", excess - dis),
            check("variance_identity", (second - dis).abs()),
            PropertyCheck {
                name: "disagreement".into(),
                statistic: dis,
                bound: 1.0,
                pass: None,
                n,
                seed,
            },
            PropertyCheck {
                name: "excess".into(),
                statistic: excess,
                bound: dis,
                pass: None,
                n,
                seed,
            },
        ],
    })
}
