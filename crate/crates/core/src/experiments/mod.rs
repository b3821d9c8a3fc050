//! Data synthesis, parameter selection, a proximal-gradient oracle and
//! regression metrics.
//!
//! Randomness comes from ChaCha8 seeded by the user seed; each artifact draws
//! from its own stream (see [`Stream`]), so changing one artifact's size does
//! not perturb the others.

mod deblur;
mod ista;
mod regression;
mod selection;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use deblur::{sparse_test_image, DeblurConfig, DeblurProblem};
pub use ista::{ista_oracle, ista_step, power_iteration, IstaOutcome};
pub use regression::{
    make_regression_instance, regression_metrics, RegressionMetrics, REFERENCE_SUPPORT_WEIGHTS,
};
pub use selection::{
    discrepancy_principle, regularization_path, DiscrepancyConfig, DiscrepancyOutcome, PathPoint,
};

use nalgebra::DVector;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Independent random streams derived from one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Noise = 1,
    Design = 2,
    Outliers = 3,
    ResponseNoise = 4,
    Image = 5,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// `f + e` with `e` Gaussian, rescaled so that `||e||_2 = delta ||f||_2` exactly.
pub fn add_relative_noise(f: &DVector<f64>, delta: f64, seed: u64) -> Result<DVector<f64>> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise level must be nonnegative, got {delta}"
        )));
    }
    if delta == 0.0 {
        return Ok(f.clone());
    }
    let norm = f.norm();
    if norm == 0.0 {
        return Err(Error::InvalidParameter(
            "relative noise on a zero signal".into(),
        ));
    }
    let mut rng = stream_rng(seed, Stream::Noise);
    let e = DVector::from_fn(f.len(), |_, _| StandardNormal.sample(&mut rng));
    let e_norm: f64 = e.norm();
    if e_norm == 0.0 {
        return Err(Error::NonFinite("noise draw"));
    }
    Ok(f + e * (delta * norm / e_norm))
}
