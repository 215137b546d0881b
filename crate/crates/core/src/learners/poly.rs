use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Label;
use crate::learners::Classifier;
use crate::solvers::l1_fit;
use crate::synthdata::Dataset;

/// Largest monomial basis `expand_monomials` will build.
pub const MAX_FEATURES: u128 = 1_000_000;

/// `C(d+k, k)`, saturating at `u128::MAX`.
pub fn monomial_count(d: usize, k: usize) -> u128 {
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        c = match c.checked_mul(d as u128 + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    c
}

fn check_size(d: usize, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("polynomial degree must be >= 1".into()));
    }
    let n = monomial_count(d, k);
    if n > MAX_FEATURES {
        return Err(Error::FeatureBlowup { features: n });
    }
    Ok(())
}

/// Exponent tuples of total degree ≤ k, graded by degree and
/// lexicographically descending within a degree: `1, a, b, a², ab, b², ...`.
pub fn monomial_exponents(d: usize, k: usize) -> Result<Vec<Vec<u32>>> {
    check_size(d, k)?;
    let mut out = Vec::with_capacity(monomial_count(d, k) as usize);
    let mut cur = vec![0u32; d];
    for t in 0..=k as u32 {
        fill(&mut cur, 0, t, &mut out);
    }
    Ok(out)
}

fn fill(cur: &mut [u32], pos: usize, left: u32, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(cur.to_vec());
        return;
    }
    if cur.is_empty() {
        return;
    }
    for e in (0..=left).rev() {
        cur[pos] = e;
        fill(cur, pos + 1, left - e, out);
    }
    cur[pos] = 0;
}

fn eval_monomials(x: &[f64], exps: &[Vec<u32>], k: usize, out: &mut Vec<f64>) {
    // powers[i][e] = x_i^e
    let powers: Vec<Vec<f64>> = x
        .iter()
        .map(|&xi| {
            let mut p = Vec::with_capacity(k + 1);
            let mut acc = 1.0;
            for _ in 0..=k {
                p.push(acc);
                acc *= xi;
            }
            p
        })
        .collect();
    out.clear();
    out.extend(exps.iter().map(|e| {
        e.iter()
            .enumerate()
            .map(|(i, &p)| powers[i][p as usize])
            .product::<f64>()
    }));
}

/// All monomials of `x` with total degree ≤ k, constant term first.
pub fn expand_monomials(x: &[f64], k: usize) -> Result<Vec<f64>> {
    let exps = monomial_exponents(x.len(), k)?;
    let mut out = Vec::new();
    eval_monomials(x, &exps, k, &mut out);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polynomial {
    d: usize,
    degree: usize,
    #[serde(skip)]
    exponents: Vec<Vec<u32>>,
    coefficients: Vec<f64>,
}

impl Polynomial {
    pub fn new(d: usize, degree: usize, coefficients: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("polynomial dimension must be >= 1".into()));
        }
        let exponents = monomial_exponents(d, degree)?;
        if coefficients.len() != exponents.len() {
            return Err(Error::DimensionMismatch {
                expected: exponents.len(),
                got: coefficients.len(),
            });
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("polynomial coefficients must be finite".into()));
        }
        Ok(Polynomial {
            d,
            degree,
            exponents,
            coefficients,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let mut feats = Vec::with_capacity(self.exponents.len());
        eval_monomials(x, &self.exponents, self.degree, &mut feats);
        feats.iter().zip(&self.coefficients).map(|(f, c)| f * c).sum()
    }
}

/// `x ↦ sign(p(x) − θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyThreshold {
    pub p: Polynomial,
    pub theta: f64,
}

impl PolyThreshold {
    pub fn new(p: Polynomial, theta: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&theta) {
            return Err(Error::InvalidParameter(format!("theta must lie in [-1,1], got {theta}")));
        }
        Ok(PolyThreshold { p, theta })
    }
}

impl Classifier for PolyThreshold {
    fn dim(&self) -> usize {
        self.p.dim()
    }

    fn predict(&self, x: &[f64]) -> Label {
        Label::from_sign(self.p.evaluate(x) - self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdChoice {
    pub theta: f64,
    pub errors: usize,
}

impl ThresholdChoice {
    pub fn error_rate(&self, n: usize) -> f64 {
        self.errors as f64 / n as f64
    }
}

/// Threshold in `[-1, 1]` minimizing the empirical error of
/// `sign(value − θ)`; candidates are `±1` and clamped midpoints of adjacent
/// sorted values, ties to the smallest θ.
pub fn select_threshold(values: &[f64], labels: &[Label]) -> Result<ThresholdChoice> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("select_threshold needs n >= 1".into()));
    }
    if values.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: values.len(),
            got: labels.len(),
        });
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidParameter("select_threshold got NaN".into()));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();

    let mut cands = vec![-1.0, 1.0];
    cands.extend(
        sorted
            .windows(2)
            .map(|w| (0.5 * (w[0] + w[1])).clamp(-1.0, 1.0)),
    );
    cands.sort_by(f64::total_cmp);
    cands.dedup();

    // pos_below[j] = positives among the j smallest values
    let n = sorted.len();
    let mut pos_below = vec![0usize; n + 1];
    for (j, &i) in order.iter().enumerate() {
        pos_below[j + 1] = pos_below[j] + usize::from(labels[i] == Label::Pos);
    }
    let total_pos = pos_below[n];

    let mut best = ThresholdChoice {
        theta: cands[0],
        errors: usize::MAX,
    };
    let mut j = 0;
    for &theta in &cands {
        // predicted negative exactly when value < θ
        while j < n && sorted[j] < theta {
            j += 1;
        }
        let neg_above = (n - j) - (total_pos - pos_below[j]);
        let errors = pos_below[j] + neg_above;
        if errors < best.errors {
            best = ThresholdChoice { theta, errors };
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    pub model: PolyThreshold,
    /// `E_S|p(x) − y|`
    pub l1_error: f64,
    pub train_error: f64,
}

impl Classifier for PolyFit {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn predict(&self, x: &[f64]) -> Label {
        self.model.predict(x)
    }
}

/// L1 polynomial regression followed by threshold selection.
///
/// Fails with `InvariantViolation` if the training error ever exceeds half
/// the L1 error (checked on every call).
pub fn train_poly_regression(s: &Dataset, k: usize) -> Result<PolyFit> {
    let d = s.dim();
    let exps = monomial_exponents(d, k)?;
    let p = exps.len();
    if s.len() < p {
        return Err(Error::InsufficientSamples {
            needed: p,
            got: s.len(),
        });
    }
    let features: Vec<Vec<f64>> = s
        .iter()
        .map(|smp| {
            let mut f = Vec::with_capacity(p);
            eval_monomials(&smp.x, &exps, k, &mut f);
            f
        })
        .collect();
    let targets: Vec<f64> = s.iter().map(|smp| smp.y.as_f64()).collect();
    let fit = l1_fit(&features, &targets)?;
    let values: Vec<f64> = features
        .iter()
        .map(|f| f.iter().zip(&fit.coefficients).map(|(a, c)| a * c).sum())
        .collect();
    let l1_error = values
        .iter()
        .zip(&targets)
        .map(|(v, y)| (v - y).abs())
        .sum::<f64>()
        / s.len() as f64;
    let labels: Vec<Label> = s.iter().map(|smp| smp.y).collect();
    let choice = select_threshold(&values, &labels)?;
    let train_error = choice.error_rate(s.len());
    if train_error > 0.5 * l1_error + 1e-12 {
        return Err(Error::InvariantViolation(format!(
            "training error {train_error} exceeds half the L1 error {l1_error}"
        )));
    }
    let poly = Polynomial::new(d, k, fit.coefficients)?;
    Ok(PolyFit {
        model: PolyThreshold::new(poly, choice.theta)?,
        l1_error,
        train_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_order() {
        let (a, b) = (2.0, 3.0);
        assert_eq!(expand_monomials(&[a, b], 1).unwrap(), vec![1.0, a, b]);
        assert_eq!(
            expand_monomials(&[a, b], 2).unwrap(),
            vec![1.0, a, b, a * a, a * b, b * b]
        );
        assert_eq!(expand_monomials(&[1.0, 2.0, 3.0], 4).unwrap().len(), 35);
        assert_eq!(monomial_count(3, 4), 35);
    }

    #[test]
    fn exponent_listing() {
        let e = monomial_exponents(3, 2).unwrap();
        assert_eq!(e[0], vec![0, 0, 0]);
        assert_eq!(&e[1..4], &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(e[4], vec![2, 0, 0]);
        assert_eq!(e[5], vec![1, 1, 0]);
        assert_eq!(e.len(), 10);
    }

    #[test]
    fn blowup() {
        assert_eq!(
            expand_monomials(&[0.0; 100], 5),
            Err(Error::FeatureBlowup {
                features: monomial_count(100, 5)
            })
        );
        assert!(expand_monomials(&[1.0], 0).is_err());
    }

    #[test]
    fn threshold_examples() {
        let c = select_threshold(&[-1.0, 1.0], &[Label::Neg, Label::Pos]).unwrap();
        assert_eq!((c.theta, c.errors), (0.0, 0));
        let c = select_threshold(&[0.2, -0.5, 3.0], &[Label::Pos; 3]).unwrap();
        assert_eq!((c.theta, c.errors), (-1.0, 0));
        let c = select_threshold(&[-2.0, -3.0], &[Label::Neg; 2]).unwrap();
        assert_eq!(c.errors, 0);
        assert!(select_threshold(&[], &[]).is_err());
    }

    #[test]
    fn sign_data_degree_one() {
        let pairs: Vec<(Vec<f64>, i8)> = (0..40)
            .map(|i| {
                let x = (i as f64 - 19.5) / 7.0;
                (vec![x], if x >= 0.0 { 1 } else { -1 })
            })
            .collect();
        let s = Dataset::from_pairs(1, &pairs).unwrap();
        let fit = train_poly_regression(&s, 1).unwrap();
        assert_eq!(fit.train_error, 0.0);
        for (x, y) in &pairs {
            assert_eq!(fit.model.predict(x).as_i8(), *y);
        }
    }

    #[test]
    fn too_few_samples() {
        let s = Dataset::from_pairs(2, &[(vec![1.0, 0.0], 1)]).unwrap();
        assert_eq!(
            train_poly_regression(&s, 2).unwrap_err(),
            Error::InsufficientSamples { needed: 6, got: 1 }
        );
    }
}
