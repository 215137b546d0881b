//! Dense-tableau primal simplex for
//!
//! ```text
//! maximize cᵀx  subject to  M x = r,  l ≤ x ≤ u
//! ```
//!
//! with finite lower bounds and optional upper bounds. Phase 1 drives one
//! artificial per row to zero; in phase 2 the artificials are fixed at zero.
//! Entering and leaving choices follow Bland's rule, so the method
//! terminates on degenerate problems.
//!
//! Besides the primal solution the solver returns the simplex multipliers
//! `y` (with reduced costs `c_j - yᵀM_j`), which the LP and L1 solvers use to
//! recover the solution of the primal problem they dualized.

use crate::error::{Error, Result};

pub const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const PHASE1_TOL: f64 = 1e-7;

/// Entering-variable rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pricing {
    /// First eligible column.
    #[default]
    Bland,
    /// Largest reduced cost, switching to Bland after
    /// [`DEGENERATE_RUN`] consecutive degenerate pivots until one makes
    /// progress.
    Dantzig,
}

pub const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bound {
    Basic,
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Optimal(SimplexSolution),
    /// Phase 1 could not reach `M x = r` within the bounds.
    Infeasible,
    /// Phase 2 objective reached the caller's early-stop level.
    Exceeded { objective: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// One multiplier per equality row.
    pub multipliers: Vec<f64>,
    pub iterations: usize,
}

/// Bounded-variable LP in equality form.
#[derive(Debug, Clone)]
pub struct BoundedLp {
    /// Row-major `rows × cols`.
    pub matrix: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
    pub rhs: Vec<f64>,
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

struct Tableau {
    rows: usize,
    width: usize,
    /// `rows × width`, columns are structurals then artificials.
    t: Vec<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<Bound>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    reduced: Vec<f64>,
    iterations: usize,
    max_iterations: usize,
    pricing: Pricing,
    degenerate: usize,
}

enum Step {
    Optimal,
    Moved { gain: f64 },
    Unbounded,
}

impl Tableau {
    fn value(&self, j: usize) -> f64 {
        match self.state[j] {
            Bound::Lower => self.lower[j],
            Bound::Upper => self.upper[j],
            Bound::Basic => unreachable!("basic values live in beta"),
        }
    }

    fn set_reduced_costs(&mut self, cost: &[f64]) {
        let w = self.width;
        for j in 0..w {
            let mut d = cost[j];
            for i in 0..self.rows {
                d -= cost[self.basis[i]] * self.t[i * w + j];
            }
            self.reduced[j] = if self.state[j] == Bound::Basic { 0.0 } else { d };
        }
    }

    /// One Bland step. Returns the objective gain.
    fn step(&mut self) -> Result<Step> {
        if self.iterations >= self.max_iterations {
            return Err(Error::NumericalBreakdown {
                iterations: self.iterations,
            });
        }
        let w = self.width;
        let eligible = |j: usize| {
            let d = self.reduced[j];
            match self.state[j] {
                Bound::Lower => d > OPT_TOL && self.upper[j] > self.lower[j],
                Bound::Upper => d < -OPT_TOL,
                Bound::Basic => false,
            }
        };
        let entering = if self.pricing == Pricing::Dantzig && self.degenerate < DEGENERATE_RUN {
            let mut best: Option<usize> = None;
            for j in (0..w).filter(|&j| eligible(j)) {
                if best.is_none_or(|b| self.reduced[j].abs() > self.reduced[b].abs()) {
                    best = Some(j);
                }
            }
            best
        } else {
            (0..w).find(|&j| eligible(j))
        };
        let Some(j) = entering else {
            return Ok(Step::Optimal);
        };
        self.iterations += 1;
        let dir = if self.state[j] == Bound::Lower { 1.0 } else { -1.0 };

        // ratio test, ties to the smallest basic variable index
        let mut limit = self.upper[j] - self.lower[j];
        let mut leave: Option<(usize, Bound)> = None;
        for i in 0..self.rows {
            let alpha = dir * self.t[i * w + j];
            let b = self.basis[i];
            let (ratio, to) = if alpha > PIVOT_TOL {
                (((self.beta[i] - self.lower[b]).max(0.0)) / alpha, Bound::Lower)
            } else if alpha < -PIVOT_TOL && self.upper[b].is_finite() {
                (((self.upper[b] - self.beta[i]).max(0.0)) / -alpha, Bound::Upper)
            } else {
                continue;
            };
            let better = match leave {
                _ if ratio < limit => true,
                Some((p, _)) if ratio == limit => b < self.basis[p],
                _ => false,
            };
            if better {
                limit = ratio;
                leave = Some((i, to));
            }
        }
        if !limit.is_finite() {
            return Ok(Step::Unbounded);
        }
        let gain = self.reduced[j] * dir * limit;
        if limit > 0.0 {
            self.degenerate = 0;
        } else {
            self.degenerate += 1;
        }

        for i in 0..self.rows {
            self.beta[i] -= dir * limit * self.t[i * w + j];
        }
        match leave {
            None => {
                // bound flip, basis unchanged
                self.state[j] = if dir > 0.0 { Bound::Upper } else { Bound::Lower };
            }
            Some((p, to)) => {
                let entering_value = self.value(j) + dir * limit;
                let out = self.basis[p];
                self.state[out] = to;
                self.state[j] = Bound::Basic;
                self.basis[p] = j;
                self.beta[p] = entering_value;
                self.pivot(p, j);
            }
        }
        Ok(Step::Moved { gain })
    }

    fn pivot(&mut self, p: usize, j: usize) {
        let w = self.width;
        let piv = self.t[p * w + j];
        for k in 0..w {
            self.t[p * w + k] /= piv;
        }
        let (before, rest) = self.t.split_at_mut(p * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[j];
            if f != 0.0 {
                for (x, &pv) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * pv;
                }
            }
        }
        let f = self.reduced[j];
        if f != 0.0 {
            for (x, &pv) in self.reduced.iter_mut().zip(prow.iter()) {
                *x -= f * pv;
            }
        }
        self.reduced[j] = 0.0;
    }
}

impl BoundedLp {
    fn validate(&self) -> Result<()> {
        let ok = self.matrix.len() == self.rows * self.cols
            && self.rhs.len() == self.rows
            && self.cost.len() == self.cols
            && self.lower.len() == self.cols
            && self.upper.len() == self.cols
            && self.lower.iter().all(|l| l.is_finite())
            && self.lower.iter().zip(&self.upper).all(|(l, u)| l <= u);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter("malformed bounded LP".into()))
        }
    }

    /// Solves the LP. Phase 2 stops early, reporting
    /// [`Outcome::Exceeded`], once the objective rises above `stop_above`.
    pub fn solve(&self, max_iterations: usize, stop_above: Option<f64>) -> Result<Outcome> {
        self.solve_from(&vec![false; self.cols], Pricing::Bland, max_iterations, stop_above)
    }

    /// As [`solve`](Self::solve), starting structural `j` at its upper bound
    /// when `at_upper[j]` is set, with the given pricing rule.
    pub fn solve_from(
        &self,
        at_upper: &[bool],
        pricing: Pricing,
        max_iterations: usize,
        stop_above: Option<f64>,
    ) -> Result<Outcome> {
        self.validate()?;
        if at_upper.len() != self.cols
            || at_upper.iter().zip(&self.upper).any(|(&u, b)| u && !b.is_finite())
        {
            return Err(Error::InvalidParameter("start bounds do not match the LP".into()));
        }
        let start = |j: usize| if at_upper[j] { self.upper[j] } else { self.lower[j] };
        let (m, n) = (self.rows, self.cols);
        let width = n + m;

        let mut residual = self.rhs.clone();
        for i in 0..m {
            for j in 0..n {
                residual[i] -= self.matrix[i * n + j] * start(j);
            }
        }
        let sign: Vec<f64> = residual.iter().map(|r| if *r < 0.0 { -1.0 } else { 1.0 }).collect();

        let mut t = vec![0.0; m * width];
        for i in 0..m {
            for j in 0..n {
                t[i * width + j] = sign[i] * self.matrix[i * n + j];
            }
            t[i * width + n + i] = 1.0;
        }
        let mut lower = self.lower.clone();
        lower.extend(std::iter::repeat_n(0.0, m));
        let mut upper = self.upper.clone();
        upper.extend(std::iter::repeat_n(f64::INFINITY, m));
        let mut state: Vec<Bound> = at_upper
            .iter()
            .map(|&u| if u { Bound::Upper } else { Bound::Lower })
            .collect();
        state.extend(std::iter::repeat_n(Bound::Basic, m));

        let mut tab = Tableau {
            rows: m,
            width,
            t,
            beta: residual.iter().zip(&sign).map(|(r, s)| r * s).collect(),
            basis: (n..width).collect(),
            state,
            lower,
            upper,
            reduced: vec![0.0; width],
            iterations: 0,
            max_iterations,
            pricing,
            degenerate: 0,
        };

        // phase 1: maximize -Σ artificials
        let mut phase1_cost = vec![0.0; width];
        phase1_cost[n..].iter_mut().for_each(|c| *c = -1.0);
        tab.set_reduced_costs(&phase1_cost);
        while let Step::Moved { .. } = tab.step()? {}
        let infeasibility: f64 = (0..m)
            .filter(|&i| tab.basis[i] >= n)
            .map(|i| tab.beta[i].abs())
            .sum();
        let scale = 1.0 + self.rhs.iter().map(|r| r.abs()).sum::<f64>();
        if infeasibility > PHASE1_TOL * scale {
            return Ok(Outcome::Infeasible);
        }
        for a in n..width {
            tab.upper[a] = 0.0;
            if tab.state[a] != Bound::Basic {
                tab.state[a] = Bound::Lower;
            }
        }

        // phase 2
        let mut cost = self.cost.clone();
        cost.extend(std::iter::repeat_n(0.0, m));
        tab.set_reduced_costs(&cost);
        let x_of = |tab: &Tableau| {
            let mut x = vec![0.0; width];
            for j in 0..width {
                if tab.state[j] != Bound::Basic {
                    x[j] = tab.value(j);
                }
            }
            for i in 0..m {
                x[tab.basis[i]] = tab.beta[i];
            }
            x
        };
        let objective_of = |x: &[f64]| -> f64 { self.cost.iter().zip(x).map(|(c, v)| c * v).sum() };
        let mut objective = objective_of(&x_of(&tab));
        loop {
            if let Some(level) = stop_above {
                if objective > level {
                    return Ok(Outcome::Exceeded { objective });
                }
            }
            match tab.step()? {
                Step::Optimal => break,
                Step::Moved { gain } => objective += gain,
                Step::Unbounded => {
                    return Err(Error::InvalidParameter("linear program is unbounded".into()))
                }
            }
        }

        let x = x_of(&tab);
        // yᵀ = c_Bᵀ B⁻¹ and artificial column i of the tableau is B⁻¹ sign_i e_i
        let multipliers = (0..m)
            .map(|i| {
                let acc: f64 = (0..m)
                    .map(|r| cost[tab.basis[r]] * tab.t[r * width + n + i])
                    .sum();
                acc * sign[i]
            })
            .collect();
        Ok(Outcome::Optimal(SimplexSolution {
            objective: objective_of(&x),
            x: x[..n].to_vec(),
            multipliers,
            iterations: tab.iterations,
        }))
    }
}
