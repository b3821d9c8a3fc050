//! The B-semismooth Newton drivers: classify, reduce to an LCP, recover the
//! direction, backtrack on the merit and update.

mod history;
mod reduced;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lcp::{solve_lcp, LcpInstance, LcpSolution, LcpSolverKind, COMPLEMENTARITY_TOL};
use crate::linalg::SymmetricOperator;
use crate::problem::WeightedL1Problem;
use crate::residual::{classify_with_gradient, residual_from_gradient, IndexPartition};

pub use history::{format_sci, write_history_csv, write_history_dat};
pub use reduced::ReducedSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Plain index sets.
    Bssn,
    /// Modified index sets; globally convergent.
    ModBssn,
    /// Plain sets until stagnation, then modified sets for good.
    Hybrid,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bssn" => Ok(Variant::Bssn),
            "modbssn" => Ok(Variant::ModBssn),
            "hybrid" | "hybridbssn" => Ok(Variant::Hybrid),
            other => Err(Error::InvalidParameter(format!(
                "unknown variant {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Bssn => "bssn",
            Variant::ModBssn => "modbssn",
            Variant::Hybrid => "hybrid",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub gamma: f64,
    pub armijo_sigma: f64,
    pub armijo_beta: f64,
    /// Stop once `||F(u)||_2 < tol`.
    pub tol: f64,
    pub variant: Variant,
    /// Hybrid switch: after step `j` with `j > j_max` and `t_j < t_min`.
    pub j_max: usize,
    pub t_min: f64,
    pub max_outer: usize,
    pub max_backtracks: usize,
    /// Min-map tolerance handed to the LCP solver.
    pub lcp_tol: f64,
    /// Keep every iterate in [`SolveResult::iterates`].
    pub record_iterates: bool,
    /// Abort when `||u||_inf` exceeds this bound.
    pub divergence_cap: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            armijo_sigma: 0.01,
            armijo_beta: 0.5,
            tol: 1e-7,
            variant: Variant::ModBssn,
            j_max: 250,
            t_min: 1e-5,
            max_outer: 1000,
            max_backtracks: 60,
            lcp_tol: COMPLEMENTARITY_TOL,
            record_iterates: false,
            divergence_cap: 1e12,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma must be positive, got {}", self.gamma));
        }
        if !(self.armijo_sigma > 0.0 && self.armijo_sigma < 0.5) {
            return bad(format!(
                "armijo_sigma must lie in (0, 0.5), got {}",
                self.armijo_sigma
            ));
        }
        if !(self.armijo_beta > 0.0 && self.armijo_beta < 1.0) {
            return bad(format!(
                "armijo_beta must lie in (0, 1), got {}",
                self.armijo_beta
            ));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.t_min.is_nan() || self.t_min <= 0.0 {
            return bad(format!("t_min must be positive, got {}", self.t_min));
        }
        if self.lcp_tol.is_nan() || self.lcp_tol <= 0.0 {
            return bad(format!("lcp_tol must be positive, got {}", self.lcp_tol));
        }
        if self.divergence_cap.is_nan() || self.divergence_cap <= 0.0 {
            return bad(format!(
                "divergence_cap must be positive, got {}",
                self.divergence_cap
            ));
        }
        Ok(())
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }
}

/// One row of the iteration history. Row `j` describes `u^j` and the step
/// that produced it; row 0 is the starting point and carries no step data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub j: usize,
    pub residual_norm: f64,
    /// `g(u) + sum_k w_k |u_k|`.
    pub objective: f64,
    pub step: Option<f64>,
    pub lcp_size: usize,
    /// Dimension of the factored active block.
    pub sle_size: usize,
    /// Right-hand sides solved with that factorization.
    pub sle_count: usize,
    pub backtracks: usize,
    /// Index sets that produced the step (`Bssn` or `ModBssn`).
    pub variant_active: Variant,
    pub lcp_solver: Option<LcpSolverKind>,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub u_star: DVector<f64>,
    pub records: Vec<IterationRecord>,
    pub converged: bool,
    /// Step after which the hybrid driver switched to the modified sets.
    pub switch_step: Option<usize>,
    /// `u^0, u^1, ...` when requested.
    pub iterates: Option<Vec<DVector<f64>>>,
}

impl SolveResult {
    pub fn steps(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn unit_steps(&self) -> usize {
        self.records.iter().filter(|r| r.step == Some(1.0)).count()
    }

    pub fn final_residual(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.residual_norm)
    }
}

/// A Newton direction together with the bookkeeping of its computation.
#[derive(Debug, Clone)]
pub struct NewtonStep {
    pub direction: DVector<f64>,
    pub lcp: LcpInstance,
    pub lcp_solution: LcpSolution,
    pub sle_size: usize,
    pub sle_count: usize,
}

/// Builds the reduced LCP and the data for direction recovery at `u`.
pub fn assemble_reduced_lcp(
    problem: &WeightedL1Problem,
    u: &DVector<f64>,
    partition: &IndexPartition,
    use_modified: bool,
) -> Result<ReducedSystem> {
    let grad = problem.checked_gradient(u)?;
    let f = residual_from_gradient(problem, u, &grad);
    let hessian = problem.objective().hessian(u);
    ReducedSystem::build(
        hessian.as_ref(),
        u,
        &f,
        partition.sets(use_modified),
        problem.gamma(),
    )
}

/// Direction from an assembled system and a solution of its LCP.
pub fn newton_direction(
    system: &ReducedSystem,
    u: &DVector<f64>,
    lcp_solution: &LcpSolution,
) -> Result<DVector<f64>> {
    system.direction(u, lcp_solution)
}

/// Classifies, assembles, solves the LCP and recovers the direction at `u`.
pub fn newton_step(
    problem: &WeightedL1Problem,
    u: &DVector<f64>,
    use_modified: bool,
    lcp_tol: f64,
) -> Result<NewtonStep> {
    let grad = problem.checked_gradient(u)?;
    let f = residual_from_gradient(problem, u, &grad);
    let partition = classify_with_gradient(problem, u, &grad);
    let hessian = problem.objective().hessian(u);
    step_from_parts(
        problem,
        u,
        &f,
        &partition,
        hessian.as_ref(),
        use_modified,
        lcp_tol,
    )
}

fn step_from_parts(
    problem: &WeightedL1Problem,
    u: &DVector<f64>,
    f: &DVector<f64>,
    partition: &IndexPartition,
    hessian: &dyn SymmetricOperator,
    use_modified: bool,
    lcp_tol: f64,
) -> Result<NewtonStep> {
    let system =
        ReducedSystem::build(hessian, u, f, partition.sets(use_modified), problem.gamma())?;
    let lcp_solution = solve_lcp(&system.lcp, lcp_tol)?;
    let direction = system.direction(u, &lcp_solution)?;
    Ok(NewtonStep {
        direction,
        sle_size: system.active_size(),
        sle_count: system.solve_count,
        lcp: system.lcp,
        lcp_solution,
    })
}

/// Point evaluated during the line search, kept so the accepted trial is not
/// recomputed.
struct Trial {
    u: DVector<f64>,
    grad: DVector<f64>,
    f: DVector<f64>,
}

fn armijo_trial(
    problem: &WeightedL1Problem,
    u: &DVector<f64>,
    d: &DVector<f64>,
    theta: f64,
    config: &SolverConfig,
) -> Result<(f64, usize, Trial)> {
    let mut t = 1.0;
    for l in 0..=config.max_backtracks {
        let candidate = u + d * t;
        let grad = problem.checked_gradient(&candidate)?;
        let f = residual_from_gradient(problem, &candidate, &grad);
        if f.norm_squared() <= (1.0 - 2.0 * config.armijo_sigma * t) * theta {
            return Ok((
                t,
                l,
                Trial {
                    u: candidate,
                    grad,
                    f,
                },
            ));
        }
        t *= config.armijo_beta;
    }
    Err(Error::LineSearch(config.max_backtracks))
}

/// Largest `t = beta^l` with `Theta(u + t d) <= (1 - 2 sigma t) Theta(u)`.
pub fn armijo_search(
    problem: &WeightedL1Problem,
    u: &DVector<f64>,
    d: &DVector<f64>,
    config: &SolverConfig,
) -> Result<(f64, usize)> {
    Error::check_len(problem.dim(), d.len())?;
    let theta = crate::residual::merit(problem, u)?;
    armijo_trial(problem, u, d, theta, config).map(|(t, l, _)| (t, l))
}

/// Runs the configured driver from `u0`. `config.gamma` replaces the
/// problem's own scaling.
///
/// Exhausting `max_outer` is not an error; the result reports `converged = false`.
pub fn solve(
    problem: &WeightedL1Problem,
    u0: &DVector<f64>,
    config: &SolverConfig,
) -> Result<SolveResult> {
    config.validate()?;
    Error::check_len(problem.dim(), u0.len())?;
    if u0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("starting point"));
    }
    let problem = problem.with_gamma(config.gamma)?;
    let objective = problem.objective().clone();
    let constant_hessian = objective
        .has_constant_hessian()
        .then(|| objective.hessian(u0));

    let mut use_modified = config.variant == Variant::ModBssn;
    let active_variant = |modified: bool| {
        if modified {
            Variant::ModBssn
        } else {
            Variant::Bssn
        }
    };
    let mut u = u0.clone();
    let mut grad = problem.checked_gradient(&u)?;
    let mut f = residual_from_gradient(&problem, &u, &grad);
    let mut records = vec![IterationRecord {
        j: 0,
        residual_norm: f.norm(),
        objective: problem.penalized_value(&u),
        step: None,
        lcp_size: 0,
        sle_size: 0,
        sle_count: 0,
        backtracks: 0,
        variant_active: active_variant(use_modified),
        lcp_solver: None,
    }];
    let mut iterates = config.record_iterates.then(|| vec![u.clone()]);
    let mut switch_step = None;

    let mut j = 0;
    while f.norm() >= config.tol {
        if j >= config.max_outer {
            log::warn!("no convergence after {j} steps, residual {:e}", f.norm());
            return Ok(SolveResult {
                u_star: u,
                records,
                converged: false,
                switch_step,
                iterates,
            });
        }
        let partition = classify_with_gradient(&problem, &u, &grad);
        let hessian = match &constant_hessian {
            Some(h) => h.clone(),
            None => objective.hessian(&u),
        };
        let step = step_from_parts(
            &problem,
            &u,
            &f,
            &partition,
            hessian.as_ref(),
            use_modified,
            config.lcp_tol,
        )?;
        let theta = f.norm_squared();
        let (t, backtracks, trial) = armijo_trial(&problem, &u, &step.direction, theta, config)?;
        j += 1;
        let variant_active = active_variant(use_modified);
        u = trial.u;
        grad = trial.grad;
        f = trial.f;
        if u.amax() > config.divergence_cap {
            return Err(Error::Diverged(config.divergence_cap));
        }
        log::debug!(
            "step {j}: |F| = {:e}, t = {t}, lcp = {}, sle = {}",
            f.norm(),
            step.lcp.dim(),
            step.sle_size
        );
        records.push(IterationRecord {
            j,
            residual_norm: f.norm(),
            objective: problem.penalized_value(&u),
            step: Some(t),
            lcp_size: step.lcp.dim(),
            sle_size: step.sle_size,
            sle_count: step.sle_count,
            backtracks,
            variant_active,
            lcp_solver: Some(step.lcp_solution.solver_used),
        });
        if let Some(list) = iterates.as_mut() {
            list.push(u.clone());
        }
        if config.variant == Variant::Hybrid
            && !use_modified
            && j > config.j_max
            && t < config.t_min
        {
            use_modified = true;
            switch_step = Some(j);
            log::info!("hybrid driver switched to modified index sets after step {j}");
        }
    }
    Ok(SolveResult {
        u_star: u,
        records,
        converged: true,
        switch_step,
        iterates,
    })
}

/// Ratios `||u^{j+1} - u*|| / ||u^j - u*||^2` over consecutive iterates with
/// `u^j != u*`.
pub fn quadratic_rate_diagnostic(iterates: &[DVector<f64>], u_star: &DVector<f64>) -> Vec<f64> {
    let errors: Vec<f64> = iterates.iter().map(|u| (u - u_star).norm()).collect();
    errors
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / (w[0] * w[0]))
        .collect()
}

/// Split of the boundary coordinates by the LCP solution: `(B, C)` with
/// `x_k > 0` on `B` and `x_k = 0` on `C`, as original indices.
pub fn boundary_split(lcp: &LcpInstance, solution: &LcpSolution) -> (Vec<usize>, Vec<usize>) {
    let mut b = Vec::new();
    let mut c = Vec::new();
    for (i, &(k, _)) in lcp.back_map.iter().enumerate() {
        if solution.x[i] > 0.0 {
            b.push(k);
        } else {
            c.push(k);
        }
    }
    (b, c)
}
