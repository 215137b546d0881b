//! Numerical engines shared by the learners.

mod hinge;
mod l1;
mod lp;
pub mod simplex;

pub use hinge::{hinge_loss, hinge_objective, minimize_hinge, HingeConfig, HingeProblem, HingeSolution};
pub use l1::{l1_fit, l1_objective, L1Fit};
pub use lp::{lp_feasible, LinearConstraintSystem, FEASIBILITY_SLACK};
