//! Damped Newton method on the min-map `H(x) = min{x, N x + z}`.
//!
//! Coordinates with `(N x + z)_k < x_k` follow the affine branch, the rest the
//! identity branch. Each step solves one linear system on the affine branch and
//! is damped by an Armijo rule on `||H||^2`.

use nalgebra::DVector;

use super::{finalize, scaled_tol, LcpInstance, LcpSolution, LcpSolverKind};

const ARMIJO_SIGMA: f64 = 0.01;
const ARMIJO_BETA: f64 = 0.5;
const MAX_BACKTRACKS: usize = 60;

/// Per-iteration `||H(x^l)||_2` together with the final outcome.
#[derive(Debug, Clone)]
pub struct DampedNewtonTrace {
    pub merit_norms: Vec<f64>,
    pub solution: Option<LcpSolution>,
}

/// Returns `None` when the start condition `z_k != 0` fails, a reduced system
/// is singular, the line search stalls, or `max_steps` is exceeded.
pub fn damped_newton_lcp(inst: &LcpInstance, tol: f64, max_steps: usize) -> Option<LcpSolution> {
    damped_newton_trace(inst, tol, max_steps).solution
}

pub fn damped_newton_trace(inst: &LcpInstance, tol: f64, max_steps: usize) -> DampedNewtonTrace {
    let mut trace = DampedNewtonTrace {
        merit_norms: Vec::new(),
        solution: None,
    };
    let m = inst.dim();
    if m == 0 {
        trace.solution = Some(LcpSolution::empty());
        return trace;
    }
    // x0 = 0 needs (N x0 + z)_k != x0_k for all k
    if inst.q.iter().any(|&v| v == 0.0) {
        return trace;
    }
    let target = tol.min(scaled_tol(inst));
    let mut x = DVector::<f64>::zeros(m);
    let mut h = inst.min_map(&x);
    let mut theta = h.norm_squared();
    for _ in 0..=max_steps {
        trace.merit_norms.push(theta.sqrt());
        if h.norm() < target {
            let sol = finalize(inst, x, LcpSolverKind::DampedNewton);
            trace.solution = Some(sol);
            return trace;
        }
        if trace.merit_norms.len() > max_steps {
            return trace;
        }
        let y = inst.response(&x);
        let affine: Vec<usize> = (0..m).filter(|&k| y[k] < x[k]).collect();
        let mut newton_point = DVector::zeros(m);
        if !affine.is_empty() {
            let sub = inst
                .matrix
                .select_rows(affine.iter())
                .select_columns(affine.iter());
            let rhs = -DVector::from_iterator(affine.len(), affine.iter().map(|&k| inst.q[k]));
            let Some(chol) = sub.cholesky() else {
                return trace;
            };
            let xa = chol.solve(&rhs);
            for (&k, &v) in affine.iter().zip(xa.iter()) {
                newton_point[k] = v;
            }
        }
        let d = newton_point - &x;
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial = &x + &d * t;
            let h_trial = inst.min_map(&trial);
            let theta_trial = h_trial.norm_squared();
            if theta_trial <= (1.0 - 2.0 * ARMIJO_SIGMA * t) * theta {
                accepted = Some((trial, h_trial, theta_trial));
                break;
            }
            t *= ARMIJO_BETA;
        }
        let Some((next, h_next, theta_next)) = accepted else {
            return trace;
        };
        x = next;
        h = h_next;
        theta = theta_next;
    }
    trace
}
