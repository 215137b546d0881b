use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::learners::Classifier;
use crate::synthdata::Dataset;

#[derive(Debug, Clone, PartialEq)]
pub struct Validated<M> {
    pub model: M,
    pub index: usize,
    pub validation_error: f64,
    /// Validation error of every run, by index.
    pub errors: Vec<f64>,
}

/// Trains `runs` candidates with `trainer(run_index)` and keeps the one with
/// the smallest validation error, ties to the lowest index.
///
/// The trainer is responsible for deriving fresh data from the run index.
/// Runs execute in parallel; any trainer error is returned (lowest index
/// first).
pub fn repeat_and_validate<M, F>(trainer: F, runs: usize, validation: &Dataset) -> Result<Validated<M>>
where
    M: Classifier,
    F: Fn(usize) -> Result<M> + Sync,
{
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be >= 1".into()));
    }
    if validation.is_empty() {
        return Err(Error::InvalidParameter("validation set is empty".into()));
    }
    let models: Vec<M> = (0..runs)
        .into_par_iter()
        .map(&trainer)
        .collect::<Result<Vec<M>>>()?;
    let n = validation.len() as f64;
    let errors: Vec<f64> = models
        .par_iter()
        .map(|m| {
            validation
                .iter()
                .filter(|s| m.predict(&s.x) != s.y)
                .count() as f64
                / n
        })
        .collect();
    let mut index = 0;
    for (i, e) in errors.iter().enumerate() {
        if *e < errors[index] {
            index = i;
        }
    }
    let validation_error = errors[index];
    let model = models.into_iter().nth(index).expect("index in range");
    Ok(Validated {
        model,
        index,
        validation_error,
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Hyperplane;

    fn data() -> Dataset {
        Dataset::from_pairs(2, &[(vec![1.0, 0.2], 1), (vec![-1.0, 0.3], -1), (vec![0.5, -2.0], 1)]).unwrap()
    }

    #[test]
    fn single_run_is_trainer_output() {
        let v = repeat_and_validate(|_| Ok(Hyperplane::basis(2, 1)), 1, &data()).unwrap();
        assert_eq!(v.model, Hyperplane::basis(2, 1));
        assert_eq!(v.index, 0);
    }

    #[test]
    fn planted_perfect_candidate() {
        let v = repeat_and_validate(
            |i| Ok(if i == 3 { Hyperplane::basis(2, 0) } else { Hyperplane::basis(2, 1) }),
            6,
            &data(),
        )
        .unwrap();
        assert_eq!((v.index, v.validation_error), (3, 0.0));
    }

    #[test]
    fn ties_to_lowest_index() {
        let v = repeat_and_validate(|_| Ok(Hyperplane::basis(2, 0)), 4, &data()).unwrap();
        assert_eq!(v.index, 0);
        assert!(repeat_and_validate(|_| Ok(Hyperplane::basis(2, 0)), 0, &data()).is_err());
    }
}
