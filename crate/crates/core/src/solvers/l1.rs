use super::simplex::{BoundedLp, Outcome, Pricing};
use crate::error::{Error, Result};
use crate::geometry::dot;

#[derive(Debug, Clone, PartialEq)]
pub struct L1Fit {
    pub coefficients: Vec<f64>,
    /// `(1/n) Σ |φ_i·c - y_i|`.
    pub objective: f64,
}

pub fn l1_objective(features: &[Vec<f64>], targets: &[f64], coefficients: &[f64]) -> f64 {
    let total: f64 = features
        .iter()
        .zip(targets)
        .map(|(phi, y)| (dot(phi, coefficients) - y).abs())
        .sum();
    total / features.len() as f64
}

/// Least-absolute-deviations fit `argmin_c (1/n) Σ |φ_i·c - y_i|`.
///
/// The LP `min Σ (s⁺_i + s⁻_i)` s.t. `Φc + s⁺ - s⁻ = y` is solved through its
/// dual `max yᵀμ` s.t. `Φᵀμ = 0`, `μ ∈ [-1,1]^n`; the coefficients are the
/// simplex multipliers of the `p` equality rows.
pub fn l1_fit(features: &[Vec<f64>], targets: &[f64]) -> Result<L1Fit> {
    let n = features.len();
    if n == 0 {
        return Err(Error::InvalidParameter("l1_fit needs at least one sample".into()));
    }
    if targets.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: targets.len(),
        });
    }
    let p = features[0].len();
    if p == 0 {
        return Err(Error::InvalidParameter("l1_fit needs at least one feature".into()));
    }
    let mut matrix = vec![0.0; p * n];
    for (i, phi) in features.iter().enumerate() {
        if phi.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: phi.len(),
            });
        }
        for k in 0..p {
            matrix[k * n + i] = phi[k];
        }
    }
    let lp = BoundedLp {
        matrix,
        rows: p,
        cols: n,
        rhs: vec![0.0; p],
        cost: targets.to_vec(),
        lower: vec![-1.0; n],
        upper: vec![1.0; n],
    };
    let cap = 10 * (n + p) * (n + p);
    // each μ_i starts at the bound its cost prefers
    let at_upper: Vec<bool> = targets.iter().map(|&y| y > 0.0).collect();
    let out = lp.solve_from(&at_upper, Pricing::Dantzig, cap, None)?;
    match out {
        Outcome::Optimal(sol) => {
            let coefficients = sol.multipliers;
            let objective = l1_objective(features, targets, &coefficients);
            Ok(L1Fit {
                coefficients,
                objective,
            })
        }
        // μ = 0 is always dual feasible, so phase 1 cannot fail in exact
        // arithmetic
        Outcome::Infeasible | Outcome::Exceeded { .. } => Err(Error::NumericalBreakdown { iterations: 0 }),
    }
}
