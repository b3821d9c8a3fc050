//! One function per subcommand. Unconverged runs still write their outputs
//! before reporting a convergence failure.

use std::fs::File;
use std::path::Path;
use std::sync::Arc;

use bssn_core::experiments::{
    discrepancy_principle, make_regression_instance, regression_metrics, regularization_path,
    DeblurProblem, PathPoint, RegressionMetrics,
};
use bssn_core::lcp::cross_check;
use bssn_core::newton::SolveResult;
use bssn_core::objectives::io::{read_matrix_csv, read_vector_csv, save_pgm, write_vector_csv};
use bssn_core::prelude::*;
use nalgebra::DVector;
use serde::Serialize;

use crate::config::{
    DeblurSettings, LcpTestSettings, PathSettings, ProblemSource, RegressSettings, SolveSettings,
};
use crate::error::CliError;
use crate::output::{num, OutputDir, Table};

type Result<T, E = CliError> = std::result::Result<T, E>;

/// Summary fields shared by every solver run.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub converged: bool,
    pub steps: usize,
    pub unit_steps: usize,
    pub final_residual: f64,
    pub nonzero: usize,
    pub switch_step: Option<usize>,
    pub monotone_residual: bool,
}

impl RunSummary {
    fn new(result: &SolveResult) -> Self {
        Self {
            converged: result.converged,
            steps: result.steps(),
            unit_steps: result.unit_steps(),
            final_residual: result.final_residual(),
            nonzero: nonzero(&result.u_star),
            switch_step: result.switch_step,
            monotone_residual: result
                .records
                .windows(2)
                .all(|p| p[1].residual_norm < p[0].residual_norm),
        }
    }
}

fn nonzero(u: &DVector<f64>) -> usize {
    u.iter().filter(|v| **v != 0.0).count()
}

fn status(converged: bool) -> Result<(), CliError> {
    if converged {
        Ok(())
    } else {
        Err(CliError::Convergence(
            "iteration limit reached; outputs were written".into(),
        ))
    }
}

pub fn deblur(settings: &DeblurSettings, out: &OutputDir) -> Result<(), CliError> {
    let instance = DeblurProblem::synthesize(settings.image).map_err(CliError::config)?;
    let side = instance.config.side;
    let u0 = DVector::zeros(instance.dim());
    let gamma = settings.solver.gamma;

    let (w, reductions, result) = match settings.w {
        Some(w) => (
            w,
            None,
            solve(&instance.problem(w, gamma)?, &u0, &settings.solver)?,
        ),
        None => {
            let target = settings.discrepancy.tau * instance.noise_norm();
            let outcome = discrepancy_principle(
                |w| instance.problem(w, gamma),
                |u| instance.mismatch(u),
                &settings.discrepancy,
                target,
                &u0,
                &settings.solver,
            )?;
            let mut trail = Table::new(["w", "mismatch", "target"]);
            for &(w, m) in &outcome.trail {
                trail.push(vec![num(w), num(m), num(target)]);
            }
            out.table("discrepancy", &trail)?;
            (outcome.w, Some(outcome.reductions), outcome.result)
        }
    };

    let top = instance.original.amax().max(1.0);
    save_pgm(
        &out.path("original.pgm"),
        side,
        &instance.original,
        0.0,
        top,
    )?;
    save_pgm(&out.path("blurred.pgm"), side, &instance.data, 0.0, top)?;
    save_pgm(
        &out.path("reconstructed.pgm"),
        side,
        &result.u_star,
        0.0,
        top,
    )?;
    out.history("history", &result.records)?;

    #[derive(Serialize)]
    struct Summary {
        #[serde(flatten)]
        run: RunSummary,
        w: f64,
        discrepancy_reductions: Option<usize>,
        mismatch: f64,
        noise_norm: f64,
        relative_error: f64,
    }
    let summary = Summary {
        run: RunSummary::new(&result),
        w,
        discrepancy_reductions: reductions,
        mismatch: instance.mismatch(&result.u_star),
        noise_norm: instance.noise_norm(),
        relative_error: (&result.u_star - &instance.original).norm() / instance.original.norm(),
    };
    out.json("summary.json", &summary)?;
    log::info!(
        "deblur: {} steps, ||F|| = {:e}, w = {w:e}",
        summary.run.steps,
        summary.run.final_residual
    );
    status(result.converged)
}

/// Synthesizes the regression instance, regenerating with the next sub-seed
/// when the design is rank deficient.
fn regression_instance(
    settings: &RegressSettings,
) -> Result<(RegressionProblem, DVector<f64>, u64), CliError> {
    const ATTEMPTS: u64 = 3;
    for attempt in 0..ATTEMPTS {
        let seed = settings.seed.wrapping_add(attempt);
        let (reg, u_true) = make_regression_instance(
            settings.m,
            settings.n,
            &settings.support_weights,
            settings.outlier_fraction,
            seed,
        )
        .map_err(CliError::config)?;
        if reg.has_full_rank() {
            return Ok((reg, u_true, seed));
        }
        log::warn!("design for seed {seed} is rank deficient, regenerating");
    }
    Err(CliError::Config(format!(
        "design rank deficient after {ATTEMPTS} attempts"
    )))
}

fn support(u: &DVector<f64>) -> Vec<usize> {
    (0..u.len()).filter(|&k| u[k] != 0.0).collect()
}

fn path_table(path: &[PathPoint], n: usize) -> Table {
    let mut header: Vec<String> = [
        "w",
        "support_size",
        "std_error",
        "r_squared",
        "steps",
        "converged",
    ]
    .map(String::from)
    .to_vec();
    header.extend((1..=n).map(|k| format!("u{k}")));
    let mut table = Table::new(header);
    for p in path {
        let metric = |f: fn(&RegressionMetrics) -> f64| {
            p.metrics.as_ref().map_or(String::new(), |m| num(f(m)))
        };
        let mut row = vec![
            num(p.w),
            p.support_size.to_string(),
            metric(|m| m.std_error),
            metric(|m| m.r_squared),
            p.steps.to_string(),
            p.converged.to_string(),
        ];
        row.extend(p.u.iter().map(|&v| num(v)));
        table.push(row);
    }
    table
}

/// Grid point whose support size matches the true one (or comes closest),
/// with minimal standard error among those.
fn tuned_point(path: &[PathPoint], true_size: usize) -> Option<&PathPoint> {
    let candidates: Vec<&PathPoint> = path
        .iter()
        .filter(|p| p.converged && p.metrics.is_some())
        .collect();
    let best_gap = candidates
        .iter()
        .map(|p| p.support_size.abs_diff(true_size))
        .min()?;
    if best_gap > 0 {
        log::warn!(
            "no grid weight yields {true_size} nonzeros; closest support size is off by {best_gap}"
        );
    }
    candidates
        .into_iter()
        .filter(|p| p.support_size.abs_diff(true_size) == best_gap)
        .min_by(|a, b| {
            a.metrics
                .unwrap()
                .std_error
                .total_cmp(&b.metrics.unwrap().std_error)
        })
}

pub fn regress(settings: &RegressSettings, out: &OutputDir) -> Result<(), CliError> {
    let (reg, u_true, seed) = regression_instance(settings)?;
    let n = settings.n;
    let gamma = settings.solver.gamma;
    let objective = Arc::new(RobustObjective::new(reg.clone()));
    let problem_for = |w: f64| {
        WeightedL1Problem::from_arc(objective.clone(), WeightVector::uniform(n, w)?, gamma)
    };
    let u0 = DVector::zeros(n);

    let (w, path_ok) = match settings.w {
        Some(w) => (w, true),
        None => {
            let path = regularization_path(
                problem_for,
                &settings.weights,
                &u0,
                &settings.solver,
                Some(&reg),
            )?;
            out.table("path", &path_table(&path, n))?;
            let tuned = tuned_point(&path, nonzero(&u_true))
                .ok_or_else(|| CliError::Convergence("no grid point converged".into()))?;
            (tuned.w, path.iter().all(|p| p.converged))
        }
    };

    let result = solve(&problem_for(w)?, &u0, &settings.solver)?;
    out.history("history", &result.records)?;
    let mut coefficients = Table::new(["index", "estimate", "truth"]);
    for k in 0..n {
        coefficients.push(vec![
            (k + 1).to_string(),
            num(result.u_star[k]),
            num(u_true[k]),
        ]);
    }
    out.table("coefficients", &coefficients)?;

    #[derive(Serialize)]
    struct Summary {
        #[serde(flatten)]
        run: RunSummary,
        seed: u64,
        w: f64,
        metrics: RegressionMetrics,
        true_metrics: RegressionMetrics,
        support: Vec<usize>,
        true_support: Vec<usize>,
    }
    let summary = Summary {
        run: RunSummary::new(&result),
        seed,
        w,
        metrics: regression_metrics(&reg, &result.u_star).map_err(CliError::config)?,
        true_metrics: regression_metrics(&reg, &u_true).map_err(CliError::config)?,
        support: support(&result.u_star),
        true_support: support(&u_true),
    };
    out.json("summary.json", &summary)?;
    log::info!("regress: w = {w:e}, support {:?}", summary.support);
    status(result.converged && path_ok)
}

fn read_vector(path: &Path) -> Result<DVector<f64>, CliError> {
    let file =
        File::open(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    read_vector_csv(file).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> Result<nalgebra::DMatrix<f64>, CliError> {
    let file =
        File::open(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    read_matrix_csv(file).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Objective plus, for regression data, the problem needed for metrics.
fn load_objective(
    source: &ProblemSource,
) -> Result<(Arc<dyn Objective>, Option<RegressionProblem>), CliError> {
    match source {
        ProblemSource::Quadratic {
            matrix,
            data,
            ridge,
        } => {
            let obj = QuadraticObjective::dense(read_matrix(matrix)?, read_vector(data)?)
                .and_then(|o| o.with_ridge(*ridge))
                .map_err(CliError::config)?;
            Ok((Arc::new(obj), None))
        }
        ProblemSource::Robust {
            design,
            response,
            rho,
        } => {
            let reg =
                RegressionProblem::new(read_matrix(design)?, read_vector(response)?, *rho, 0.0)
                    .map_err(CliError::config)?;
            Ok((Arc::new(RobustObjective::new(reg.clone())), Some(reg)))
        }
    }
}

pub fn solve_files(settings: &SolveSettings, out: &OutputDir) -> Result<(), CliError> {
    let (objective, _) = load_objective(&settings.problem)?;
    let n = objective.dim();
    let weights = match (&settings.weights_file, settings.w) {
        (Some(p), _) => WeightVector::new(read_vector(p)?),
        (None, Some(w)) => WeightVector::uniform(n, w),
        (None, None) => unreachable!("validated by SolveSettings::finish"),
    }
    .map_err(CliError::config)?;
    let problem = WeightedL1Problem::from_arc(objective, weights, settings.solver.gamma)
        .map_err(CliError::config)?;
    let u0 = match &settings.start {
        Some(p) => read_vector(p)?,
        None => DVector::zeros(n),
    };
    if u0.len() != n {
        return Err(CliError::Config(format!(
            "start vector has length {}, expected {n}",
            u0.len()
        )));
    }
    let result = solve(&problem, &u0, &settings.solver)?;
    out.history("history", &result.records)?;
    let file = File::create(out.path("solution.csv"))?;
    write_vector_csv(std::io::BufWriter::new(file), &result.u_star)?;
    out.json("summary.json", &RunSummary::new(&result))?;
    status(result.converged)
}

pub fn path(settings: &PathSettings, out: &OutputDir) -> Result<(), CliError> {
    let (objective, reg) = load_objective(&settings.problem)?;
    let n = objective.dim();
    let gamma = settings.solver.gamma;
    let problem_for = |w: f64| {
        WeightedL1Problem::from_arc(objective.clone(), WeightVector::uniform(n, w)?, gamma)
    };
    let points = regularization_path(
        problem_for,
        &settings.weights,
        &DVector::zeros(n),
        &settings.solver,
        reg.as_ref(),
    )?;
    out.table("path", &path_table(&points, n))?;

    #[derive(Serialize)]
    struct Summary {
        points: usize,
        converged: usize,
        failures: Vec<(f64, String)>,
        support_sizes: Vec<usize>,
    }
    let summary = Summary {
        points: points.len(),
        converged: points.iter().filter(|p| p.converged).count(),
        failures: points
            .iter()
            .filter_map(|p| p.error.clone().map(|e| (p.w, e)))
            .collect(),
        support_sizes: points.iter().map(|p| p.support_size).collect(),
    };
    out.json("summary.json", &summary)?;
    status(summary.converged == summary.points)
}

pub fn lcp_test(settings: &LcpTestSettings, out: &OutputDir) -> Result<(), CliError> {
    let report = cross_check(
        settings.instances,
        settings.max_dim,
        settings.seed,
        settings.agreement_tol,
    );
    println!(
        "lcp-test: {} passed, {} failed",
        report.passed,
        report.failed()
    );
    for failure in &report.failures {
        println!("  {failure}");
    }
    out.json("summary.json", &report)?;
    if report.failed() > 0 {
        return Err(CliError::Internal(format!(
            "{} LCP instances failed cross-validation",
            report.failed()
        )));
    }
    Ok(())
}
