//! Learning homogeneous halfspaces under label noise.
//!
//! The crate is organized bottom-up:
//!
//! * [`geometry`]: unit normals, angles, bands, cone-cap projection.
//! * [`synthdata`]: seeded isotropic log-concave data and noise processes.
//! * [`solvers`]: bounded-variable simplex, LP feasibility, L1 regression and
//!   projected-subgradient hinge minimization.
//! * [`learners`]: LP, Kearns–Li reduction, Averaging, L1 polynomial
//!   regression and margin-based localization.
//! * [`evaluation`]: error estimates and the distributional property checks.
//! * [`experiment`]: JSON configs, reports and sweeps behind the CLI.

pub mod error;
pub mod evaluation;
pub mod experiment;
pub mod geometry;
pub mod learners;
pub mod solvers;
pub mod synthdata;

pub use error::{Error, Result};
pub use geometry::{ConeCap, Hyperplane, Instance, Label};
pub use synthdata::{Dataset, LabeledSample, MarginalSpec, NoiseSpec};
