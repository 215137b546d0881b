use crate::error::{Error, Result};
use crate::geometry::{self, Hyperplane};
use crate::synthdata::Dataset;

/// `w = E_S[y x] / ‖E_S[y x]‖`.
pub fn train_averaging(s: &Dataset) -> Result<Hyperplane> {
    if s.is_empty() {
        return Err(Error::ZeroVector);
    }
    let mut mean = vec![0.0; s.dim()];
    for smp in s.iter() {
        let y = smp.y.as_f64();
        mean.iter_mut().zip(smp.x.iter()).for_each(|(m, x)| *m += y * x);
    }
    let n = s.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    geometry::normalize(&mean)
}
