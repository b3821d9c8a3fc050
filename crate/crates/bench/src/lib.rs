//! Fixtures shared by the benchmarks in `benches/`.

use bssn_core::experiments::{
    make_regression_instance, DeblurConfig, DeblurProblem, REFERENCE_SUPPORT_WEIGHTS,
};
use bssn_core::lcp::random_spd;
use bssn_core::prelude::*;

/// Lasso on a seeded Gaussian design scaled by `1/sqrt(m)` with the reference
/// sparse ground truth and noise-free data.
pub fn lasso(m: usize, n: usize) -> WeightedL1Problem {
    let (reg, u_true) =
        make_regression_instance(m, n, &REFERENCE_SUPPORT_WEIGHTS, 0.0, 3).expect("valid instance");
    let k = reg.design / (m as f64).sqrt();
    let f = &k * u_true;
    let w = 0.05 * k.tr_mul(&f).amax();
    let objective = QuadraticObjective::dense(k, f).expect("consistent shapes");
    WeightedL1Problem::new(
        objective,
        WeightVector::uniform(n, w).expect("positive weight"),
        1.0,
    )
    .expect("valid problem")
}

/// Robust regression instance with the reference support weights.
pub fn robust(m: usize, n: usize, w: f64) -> WeightedL1Problem {
    let (reg, _) =
        make_regression_instance(m, n, &REFERENCE_SUPPORT_WEIGHTS, 0.1, 7).expect("valid instance");
    WeightedL1Problem::new(
        RobustObjective::new(reg),
        WeightVector::uniform(n, w).expect("positive weight"),
        10.0,
    )
    .expect("valid problem")
}

/// Deblurring instance on a `side x side` image.
pub fn deblur(side: usize, w: f64, gamma: f64) -> WeightedL1Problem {
    let config = DeblurConfig {
        side,
        ..DeblurConfig::default()
    };
    DeblurProblem::synthesize(config)
        .and_then(|p| p.problem(w, gamma))
        .expect("valid instance")
}

/// Symmetric positive definite LCPs of dimension `m`.
pub fn lcp(m: usize, seed: u64) -> LcpInstance {
    random_spd(m, seed)
}

pub fn config(variant: Variant, gamma: f64) -> SolverConfig {
    SolverConfig {
        variant,
        gamma,
        ..SolverConfig::default()
    }
}
