#![allow(dead_code)]

use bssn_core::experiments::{make_regression_instance, REFERENCE_SUPPORT_WEIGHTS};
use bssn_core::prelude::*;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Gaussian `K` scaled by `1/sqrt(m)`, sparse ground truth, 5% noise, and a
/// uniform weight drawn in `[0.02, 0.2] ||K^T f||_inf`.
pub fn random_lasso(m: usize, n: usize, seed: u64) -> WeightedL1Problem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / (m as f64).sqrt();
    let k = DMatrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal) * scale);
    let u_true = DVector::from_fn(n, |_, _| {
        if rng.random_bool(0.15) {
            3.0 * rng.sample::<f64, _>(StandardNormal)
        } else {
            0.0
        }
    });
    let clean = &k * &u_true;
    let noise = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let f = &clean + noise * (0.05 * clean.norm().max(1.0) / (m as f64).sqrt());
    let w = rng.random_range(0.02..0.2) * k.tr_mul(&f).amax();
    let obj = QuadraticObjective::dense(k, f).unwrap();
    WeightedL1Problem::new(obj, WeightVector::uniform(n, w).unwrap(), 1.0).unwrap()
}

/// Robust regression instance with a scaled-down copy of the reference weights.
pub fn random_robust(m: usize, n: usize, w: f64, seed: u64) -> WeightedL1Problem {
    let support: Vec<f64> = REFERENCE_SUPPORT_WEIGHTS
        .iter()
        .map(|v| v / 10.0)
        .take(n.min(8))
        .collect();
    let (reg, _) = make_regression_instance(m, n, &support, 0.1, seed).unwrap();
    WeightedL1Problem::new(
        RobustObjective::new(reg),
        WeightVector::uniform(n, w).unwrap(),
        10.0,
    )
    .unwrap()
}

pub fn support(u: &DVector<f64>) -> Vec<usize> {
    (0..u.len()).filter(|&k| u[k] != 0.0).collect()
}
