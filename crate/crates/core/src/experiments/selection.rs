//! Choice of the regularization weight: the discrepancy principle and
//! warm-started sweeps over a weight grid.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::regression::{regression_metrics, RegressionMetrics};
use crate::error::{Error, Result};
use crate::newton::{solve, SolveResult, SolverConfig};
use crate::objectives::RegressionProblem;
use crate::problem::WeightedL1Problem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscrepancyConfig {
    pub w_init: f64,
    pub q: f64,
    pub tau: f64,
    pub max_reductions: usize,
}

impl Default for DiscrepancyConfig {
    fn default() -> Self {
        Self {
            w_init: 0.9f64.powi(10),
            q: 0.9,
            tau: 2.0,
            max_reductions: 200,
        }
    }
}

impl DiscrepancyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "q must lie in (0, 1), got {}",
                self.q
            )));
        }
        if self.tau.is_nan() || self.tau < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "tau must be at least 1, got {}",
                self.tau
            )));
        }
        if !(self.w_init > 0.0 && self.w_init.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "w_init must be positive, got {}",
                self.w_init
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct DiscrepancyOutcome {
    pub w: f64,
    /// Number of reductions `i` with `w = w_init q^i`.
    pub reductions: usize,
    pub result: SolveResult,
    /// `(w, mismatch)` for every weight tried, in order.
    pub trail: Vec<(f64, f64)>,
}

impl DiscrepancyOutcome {
    pub fn u(&self) -> &DVector<f64> {
        &self.result.u_star
    }
}

/// Shrinks `w` geometrically until `mismatch(u_w) <= target`, warm starting
/// each solve from the previous minimizer.
pub fn discrepancy_principle<P, M>(
    problem_for: P,
    mismatch: M,
    dconf: &DiscrepancyConfig,
    target: f64,
    u0: &DVector<f64>,
    solver: &SolverConfig,
) -> Result<DiscrepancyOutcome>
where
    P: Fn(f64) -> Result<WeightedL1Problem>,
    M: Fn(&DVector<f64>) -> f64,
{
    dconf.validate()?;
    let mut trail = Vec::new();
    let mut start = u0.clone();
    let mut w = dconf.w_init;
    for i in 0..=dconf.max_reductions {
        let problem = problem_for(w)?;
        let result = solve(&problem, &start, solver)?;
        if !result.converged {
            return Err(Error::NoConvergence(solver.max_outer));
        }
        let r = mismatch(&result.u_star);
        trail.push((w, r));
        log::debug!("discrepancy: w = {w:e}, mismatch = {r:e}, target = {target:e}");
        if r <= target {
            return Ok(DiscrepancyOutcome {
                w,
                reductions: i,
                result,
                trail,
            });
        }
        start = result.u_star;
        w *= dconf.q;
    }
    Err(Error::DiscrepancyExhausted(dconf.max_reductions))
}

#[derive(Debug, Clone)]
pub struct PathPoint {
    pub w: f64,
    pub u: DVector<f64>,
    pub converged: bool,
    pub steps: usize,
    pub support_size: usize,
    pub metrics: Option<RegressionMetrics>,
    /// Set when the solve failed outright; the sweep continues from the last good point.
    pub error: Option<String>,
}

/// Solves along `weights` in order, warm starting each solve from the last
/// converged minimizer. Regression metrics are attached when `regression` is given.
pub fn regularization_path<P>(
    problem_for: P,
    weights: &[f64],
    u0: &DVector<f64>,
    solver: &SolverConfig,
    regression: Option<&RegressionProblem>,
) -> Result<Vec<PathPoint>>
where
    P: Fn(f64) -> Result<WeightedL1Problem>,
{
    if weights.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidParameter(
            "path weights must be strictly increasing".into(),
        ));
    }
    let mut start = u0.clone();
    let mut out = Vec::with_capacity(weights.len());
    for &w in weights {
        let problem = problem_for(w)?;
        let point = match solve(&problem, &start, solver) {
            Ok(result) => {
                if result.converged {
                    start = result.u_star.clone();
                } else {
                    log::warn!("path point w = {w:e} did not converge");
                }
                let metrics = regression
                    .map(|reg| regression_metrics(reg, &result.u_star))
                    .transpose()?;
                PathPoint {
                    w,
                    support_size: result.u_star.iter().filter(|v| **v != 0.0).count(),
                    converged: result.converged,
                    steps: result.steps(),
                    u: result.u_star,
                    metrics,
                    error: None,
                }
            }
            Err(e) => {
                log::warn!("path point w = {w:e} failed: {e}");
                PathPoint {
                    w,
                    u: start.clone(),
                    converged: false,
                    steps: 0,
                    support_size: 0,
                    metrics: None,
                    error: Some(e.to_string()),
                }
            }
        };
        out.push(point);
    }
    Ok(out)
}
