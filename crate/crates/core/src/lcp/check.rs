//! Cross-validation of the LCP solvers on random SPD instances.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{brute_force_lcp, lemke, solve_lcp, LcpInstance, LcpSolverKind, COMPLEMENTARITY_TOL};

/// Random SPD instance `N = B^T B + 0.1 I` with `B` and `z` uniform in
/// `[-1, 1]` and `[-2, 2]`.
pub fn random_spd(m: usize, seed: u64) -> LcpInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0));
    let n = b.transpose() * &b + DMatrix::identity(m, m) * 0.1;
    let q = DVector::from_fn(m, |_, _| rng.random_range(-2.0..2.0));
    LcpInstance::new(n, q).expect("square instance")
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CrossCheck {
    pub instances: usize,
    pub passed: usize,
    /// Instances where `solve_lcp` needed the Lemke fallback.
    pub lemke_fallbacks: usize,
    pub max_disagreement: f64,
    pub max_residual: f64,
    pub failures: Vec<String>,
}

impl CrossCheck {
    pub fn failed(&self) -> usize {
        self.instances - self.passed
    }
}

/// Solves `count` random instances of sizes `1..=max_dim` with [`solve_lcp`],
/// [`lemke`] and [`brute_force_lcp`]. An instance passes when all three
/// succeed, agree to `agreement_tol` in the max norm, and each has
/// complementarity residual at most `COMPLEMENTARITY_TOL (1 + ||z||_inf)`.
pub fn cross_check(count: usize, max_dim: usize, seed: u64, agreement_tol: f64) -> CrossCheck {
    let mut report = CrossCheck {
        instances: count,
        ..CrossCheck::default()
    };
    for i in 0..count {
        let m = 1 + i % max_dim.max(1);
        let inst = random_spd(m, seed.wrapping_mul(1_000_003).wrapping_add(i as u64));
        let tol = COMPLEMENTARITY_TOL * (1.0 + inst.q.amax());
        let (a, l, b) = match (
            solve_lcp(&inst, COMPLEMENTARITY_TOL),
            lemke(&inst, COMPLEMENTARITY_TOL),
            brute_force_lcp(&inst),
        ) {
            (Ok(a), Ok(l), Ok(b)) => (a, l, b),
            (a, l, b) => {
                let errors = [a.err(), l.err(), b.err()]
                    .into_iter()
                    .flatten()
                    .map(|e| e.to_string());
                report.failures.push(format!(
                    "instance {i} (m = {m}): {}",
                    errors.collect::<Vec<_>>().join("; ")
                ));
                continue;
            }
        };
        report.lemke_fallbacks += usize::from(a.solver_used == LcpSolverKind::Lemke);
        let gap = (&a.x - &b.x)
            .amax()
            .max((&l.x - &b.x).amax())
            .max((&a.x - &l.x).amax());
        let residual = [&a, &l, &b]
            .iter()
            .map(|s| s.complementarity_residual())
            .fold(0.0, f64::max);
        report.max_disagreement = report.max_disagreement.max(gap);
        report.max_residual = report.max_residual.max(residual);
        if gap <= agreement_tol && residual <= tol {
            report.passed += 1;
        } else {
            report.failures.push(format!(
                "instance {i} (m = {m}): disagreement {gap:e}, residual {residual:e}"
            ));
        }
    }
    report
}
