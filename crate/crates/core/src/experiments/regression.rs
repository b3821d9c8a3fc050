//! Sparse robust-regression instances and goodness-of-fit metrics.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{stream_rng, Stream};
use crate::error::{Error, Result};
use crate::objectives::RegressionProblem;

/// True coefficients of the reference study.
pub const REFERENCE_SUPPORT_WEIGHTS: [f64; 8] = [-33.0, -7.0, -0.1, 1.0, 2.0, 13.0, 20.0, 50.0];

/// Variance of the outlier noise.
const OUTLIER_VARIANCE: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionMetrics {
    /// `sqrt(sum r_k^2 / (m - n - 1))`.
    pub std_error: f64,
    /// `1 - (sum r_k^2 / (m - n - 1)) / (sum (y_k - mean y)^2 / (m - 1))`.
    pub r_squared: f64,
    pub support_size: usize,
}

pub fn regression_metrics(reg: &RegressionProblem, u: &DVector<f64>) -> Result<RegressionMetrics> {
    let (m, n) = (reg.samples(), reg.features());
    Error::check_len(n, u.len())?;
    if m <= n + 1 {
        return Err(Error::InvalidParameter(format!(
            "metrics need m > n + 1, got m = {m}, n = {n}"
        )));
    }
    let rss = reg.residuals(u).norm_squared();
    let y = &reg.response;
    let mean = y.mean();
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let explained = rss / (m - n - 1) as f64;
    Ok(RegressionMetrics {
        std_error: explained.sqrt(),
        r_squared: 1.0 - explained / (tss / (m - 1) as f64),
        support_size: u.iter().filter(|v| **v != 0.0).count(),
    })
}

/// Gaussian design, `y = A u_true + e` with unit noise except on a seeded
/// random subset of `floor(outlier_fraction m)` rows, where the noise has
/// variance 50. The support positions of `u_true` are seeded as well.
///
/// Returns the problem (with `rho = 1`) and `u_true`.
pub fn make_regression_instance(
    m: usize,
    n: usize,
    support_weights: &[f64],
    outlier_fraction: f64,
    seed: u64,
) -> Result<(RegressionProblem, DVector<f64>)> {
    if support_weights.len() > n {
        return Err(Error::InvalidParameter(format!(
            "{} support weights for {n} features",
            support_weights.len()
        )));
    }
    if !(0.0..=1.0).contains(&outlier_fraction) {
        return Err(Error::InvalidParameter(format!(
            "outlier fraction {outlier_fraction}"
        )));
    }
    let mut design_rng = stream_rng(seed, Stream::Design);
    let a = DMatrix::from_fn(m, n, |_, _| StandardNormal.sample(&mut design_rng));

    let mut positions: Vec<usize> = (0..n).collect();
    positions.shuffle(&mut design_rng);
    let mut u_true = DVector::zeros(n);
    for (&k, &v) in positions.iter().zip(support_weights) {
        u_true[k] = v;
    }

    let mut outlier_rng = stream_rng(seed, Stream::Outliers);
    let mut rows: Vec<usize> = (0..m).collect();
    rows.shuffle(&mut outlier_rng);
    let n_out = (outlier_fraction * m as f64).floor() as usize;
    let mut is_outlier = vec![false; m];
    for &r in &rows[..n_out] {
        is_outlier[r] = true;
    }

    let mut noise_rng = stream_rng(seed, Stream::ResponseNoise);
    let wide = Normal::new(0.0, OUTLIER_VARIANCE.sqrt()).expect("finite deviation");
    let e = DVector::from_fn(m, |k, _| {
        let unit: f64 = StandardNormal.sample(&mut noise_rng);
        if is_outlier[k] {
            wide.sample(&mut noise_rng)
        } else {
            unit
        }
    });
    let y = &a * &u_true + e;
    Ok((RegressionProblem::new(a, y, 1.0, outlier_fraction)?, u_true))
}
