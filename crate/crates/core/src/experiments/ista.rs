//! Iterative soft-thresholding, used as an independent fixed-point oracle.

use nalgebra::DVector;

use super::{stream_rng, Stream};
use crate::error::{Error, Result};
use crate::problem::{Objective, WeightedL1Problem};
use crate::residual::soft_threshold;

#[derive(Debug, Clone)]
pub struct IstaOutcome {
    pub u: DVector<f64>,
    pub iterations: usize,
    /// `||u^{k+1} - u^k||_2` per iteration.
    pub changes: Vec<f64>,
}

/// Largest eigenvalue of the Hessian at `u` by power iteration.
pub fn power_iteration(objective: &dyn Objective, u: &DVector<f64>, iterations: usize) -> f64 {
    let h = objective.hessian(u);
    let mut rng = stream_rng(0, Stream::Noise);
    let mut x = DVector::from_fn(h.dim(), |_, _| rand::Rng::random_range(&mut rng, 0.5..1.5));
    let mut lambda = 0.0;
    for _ in 0..iterations {
        let y = h.mul_vec(&x);
        let norm = y.norm();
        if norm == 0.0 {
            return 0.0;
        }
        lambda = x.dot(&y) / x.norm_squared();
        x = y / norm;
    }
    lambda
}

/// Default step `0.9 / c2`, with `c2` estimated at `u0` and inflated by 5% to
/// cover the power-iteration underestimate.
pub fn ista_step(problem: &WeightedL1Problem, u0: &DVector<f64>) -> f64 {
    let c2 = 1.05 * power_iteration(problem.objective().as_ref(), u0, 200);
    0.9 / c2
}

/// Runs `u <- S_{s w}(u - s grad g(u))` until the change drops below `tol`.
pub fn ista_oracle(
    problem: &WeightedL1Problem,
    u0: &DVector<f64>,
    step: f64,
    tol: f64,
    max_iter: usize,
) -> Result<IstaOutcome> {
    if !(step > 0.0 && tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "ISTA step {step} / tolerance {tol}"
        )));
    }
    Error::check_len(problem.dim(), u0.len())?;
    let beta = problem.weights().as_vector() * step;
    let mut u = u0.clone();
    let mut changes = Vec::new();
    for k in 0..max_iter {
        let grad = problem.objective().gradient(&u);
        let next = soft_threshold(&(&u - grad * step), &beta)?;
        let change = (&next - &u).norm();
        if !change.is_finite() {
            return Err(Error::NonFinite("ISTA iterate"));
        }
        changes.push(change);
        u = next;
        if change < tol {
            return Ok(IstaOutcome {
                u,
                iterations: k + 1,
                changes,
            });
        }
    }
    Err(Error::NoConvergence(max_iter))
}
