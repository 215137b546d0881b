//! The halfspace learners, assembled from [`crate::solvers`] and
//! [`crate::geometry`].

mod averaging;
mod kearns_li;
mod localization;
mod lp;
mod model;
mod poly;
mod repeat;
mod schedule;

pub use averaging::train_averaging;
pub use kearns_li::{realizable_sample_bound, train_kearns_li, KearnsLiConfig, KearnsLiOutcome, KearnsLiPlan};
pub use localization::{
    band_mass_reference, fill_band, localize, BandFill, BandOracle, BandStep, HingeBandOracle,
    LocalizationRun, PolyHingeBandOracle, RoundDiagnostics,
};
pub use lp::train_lp_realizable;
pub use model::Model;
pub use poly::{
    expand_monomials, monomial_count, monomial_exponents, select_threshold, train_poly_regression,
    PolyFit, PolyThreshold, Polynomial, ThresholdChoice, MAX_FEATURES,
};
pub use repeat::{repeat_and_validate, Validated};
pub use schedule::{LocalizationSchedule, RoundParams, ScheduleConstants, ScheduleMode};

use crate::geometry::{self, Hyperplane, Label};

/// Anything that labels points of `R^d`.
pub trait Classifier: Send + Sync {
    fn dim(&self) -> usize;

    /// Label of `x`; `x.len()` must equal `dim()`.
    fn predict(&self, x: &[f64]) -> Label;
}

impl Classifier for Hyperplane {
    fn dim(&self) -> usize {
        Hyperplane::dim(self)
    }

    fn predict(&self, x: &[f64]) -> Label {
        Label::from_sign(geometry::dot(self, x))
    }
}

impl<C: Classifier + ?Sized> Classifier for &C {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn predict(&self, x: &[f64]) -> Label {
        (**self).predict(x)
    }
}

impl<C: Classifier + ?Sized> Classifier for Box<C> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn predict(&self, x: &[f64]) -> Label {
        (**self).predict(x)
    }
}

/// Always predicts the same label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstantClassifier {
    pub d: usize,
    pub label: Label,
}

impl Classifier for ConstantClassifier {
    fn dim(&self) -> usize {
        self.d
    }

    fn predict(&self, _x: &[f64]) -> Label {
        self.label
    }
}
