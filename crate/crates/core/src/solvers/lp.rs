use super::simplex::{BoundedLp, Outcome};
use crate::error::{Error, Result};
use crate::geometry::dot;

/// Slack below which a row counts as satisfied.
pub const FEASIBILITY_SLACK: f64 = 1e-7;

/// Rows `a·v ≥ b` over `v ∈ R^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraintSystem {
    rows: Vec<(Vec<f64>, f64)>,
    dim: usize,
}

impl LinearConstraintSystem {
    pub fn new(dim: usize, rows: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("constraint dimension must be >= 1".into()));
        }
        for (a, b) in &rows {
            if a.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: a.len(),
                });
            }
            if !b.is_finite() || a.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidParameter("constraint entries must be finite".into()));
            }
        }
        Ok(LinearConstraintSystem { rows, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[(Vec<f64>, f64)] {
        &self.rows
    }

    /// Smallest `a·v - b` over all rows.
    pub fn min_slack(&self, v: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|(a, b)| dot(a, v) - b)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Finds `v` with `a·v ≥ b - 1e-7` for every row, or `None` when no such
/// point exists.
///
/// Solves the slack-minimization problem `min_v Σ max(0, b_i - a_i·v)`
/// through its dual `max bᵀλ` s.t. `Σ λ_i a_i = 0`, `λ ∈ [0,1]^n`, whose
/// tableau has only `dim` rows. Any dual-feasible `λ` with positive objective
/// certifies infeasibility, so the solve stops as soon as one is found; at a
/// zero optimum the simplex multipliers are the feasible point.
pub fn lp_feasible(sys: &LinearConstraintSystem) -> Result<Option<Vec<f64>>> {
    if sys.rows.is_empty() {
        return Err(Error::InvalidParameter("constraint system has no rows".into()));
    }
    let n = sys.rows.len();
    let d = sys.dim;
    let mut matrix = vec![0.0; d * n];
    for (i, (a, _)) in sys.rows.iter().enumerate() {
        for k in 0..d {
            matrix[k * n + i] = a[k];
        }
    }
    let lp = BoundedLp {
        matrix,
        rows: d,
        cols: n,
        rhs: vec![0.0; d],
        cost: sys.rows.iter().map(|(_, b)| *b).collect(),
        lower: vec![0.0; n],
        upper: vec![1.0; n],
    };
    let cap = 10 * (n + d) * (n + d);
    match lp.solve(cap, Some(FEASIBILITY_SLACK * n as f64))? {
        Outcome::Optimal(sol) => {
            let v = sol.multipliers;
            if sys.min_slack(&v) >= -FEASIBILITY_SLACK {
                Ok(Some(v))
            } else {
                Ok(None)
            }
        }
        Outcome::Exceeded { .. } | Outcome::Infeasible => Ok(None),
    }
}
