use crate::error::{Error, Result};
use crate::geometry::{self, Hyperplane};
use crate::solvers::{lp_feasible, LinearConstraintSystem};
use crate::synthdata::Dataset;

/// Realizable oracle: a halfspace with zero training error on `s`, or
/// `None` when no homogeneous halfspace separates it.
///
/// Solves `y(v·x) ≥ 1` for every sample and returns `v/‖v‖`.
pub fn train_lp_realizable(s: &Dataset) -> Result<Option<Hyperplane>> {
    if s.is_empty() {
        return Err(Error::InvalidParameter("LP learner needs a nonempty sample".into()));
    }
    let rows = s
        .iter()
        .map(|smp| {
            let y = smp.y.as_f64();
            (smp.x.iter().map(|c| y * c).collect(), 1.0)
        })
        .collect();
    let sys = LinearConstraintSystem::new(s.dim(), rows)?;
    match lp_feasible(&sys)? {
        Some(v) => {
            let w = geometry::normalize(&v)?;
            // the normalized point keeps every strict inequality
            let separates = s
                .iter()
                .all(|smp| smp.y.as_f64() * geometry::dot(&w, &smp.x) > 0.0);
            Ok(separates.then_some(w))
        }
        None => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Label;

    #[test]
    fn separable_pair() {
        let s = Dataset::from_pairs(2, &[(vec![2.0, 0.0], 1), (vec![-1.0, 1.0], -1)]).unwrap();
        let w = train_lp_realizable(&s).unwrap().unwrap();
        for smp in s.iter() {
            assert_eq!(w.classify(&smp.x).unwrap(), smp.y);
        }
    }

    #[test]
    fn contradictory_labels() {
        let s = Dataset::from_pairs(2, &[(vec![1.0, 0.0], 1), (vec![1.0, 0.0], -1)]).unwrap();
        assert_eq!(train_lp_realizable(&s).unwrap(), None);
    }

    #[test]
    fn origin_point_cannot_be_negative() {
        // y(v·0) ≥ 1 is unsatisfiable
        let s = Dataset::from_pairs(2, &[(vec![0.0, 0.0], -1)]).unwrap();
        assert_eq!(train_lp_realizable(&s).unwrap(), None);
        let _ = Label::Neg;
    }
}
