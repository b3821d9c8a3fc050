use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::SymmetricOperator;
use crate::problem::Objective;

/// Linear model data `A u ~ y` for robust regression.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionProblem {
    pub design: DMatrix<f64>,
    pub response: DVector<f64>,
    pub rho: f64,
    pub outlier_fraction: f64,
}

impl RegressionProblem {
    pub fn new(
        design: DMatrix<f64>,
        response: DVector<f64>,
        rho: f64,
        outlier_fraction: f64,
    ) -> Result<Self> {
        Error::check_len(design.nrows(), response.len())?;
        if design.nrows() < design.ncols() {
            return Err(Error::InvalidParameter(format!(
                "regression needs m >= n, got m = {}, n = {}",
                design.nrows(),
                design.ncols()
            )));
        }
        if rho.is_nan() || rho <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "rho must be positive, got {rho}"
            )));
        }
        Ok(Self {
            design,
            response,
            rho,
            outlier_fraction,
        })
    }

    pub fn samples(&self) -> usize {
        self.design.nrows()
    }

    pub fn features(&self) -> usize {
        self.design.ncols()
    }

    /// `A u - y`.
    pub fn residuals(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.design * u - &self.response
    }

    /// Full column rank check via the smallest singular value.
    pub fn has_full_rank(&self) -> bool {
        let sv = self.design.clone().svd(false, false).singular_values;
        let max = sv.max();
        max > 0.0 && sv.min() > max * 1e-12 * self.samples() as f64
    }
}

/// `phi_rho(x) = 2 (sqrt(rho + x^2 / 2) - sqrt(rho))`.
pub fn measure(rho: f64, x: f64) -> f64 {
    2.0 * ((rho + 0.5 * x * x).sqrt() - rho.sqrt())
}

/// `phi_rho'(x) = x / sqrt(rho + x^2 / 2)`.
pub fn measure_derivative(rho: f64, x: f64) -> f64 {
    x / (rho + 0.5 * x * x).sqrt()
}

/// `phi_rho''(x) = rho (rho + x^2 / 2)^(-3/2)`.
pub fn measure_second_derivative(rho: f64, x: f64) -> f64 {
    rho * (rho + 0.5 * x * x).powf(-1.5)
}

/// `g(u) = (1/m) sum_k phi_rho(a_k^T u - y_k)`.
#[derive(Debug, Clone)]
pub struct RobustObjective {
    problem: RegressionProblem,
}

impl RobustObjective {
    pub fn new(problem: RegressionProblem) -> Self {
        Self { problem }
    }

    pub fn problem(&self) -> &RegressionProblem {
        &self.problem
    }

    /// `(1/m) lambda_max(A^T A)`, an upper bound on the Hessian spectrum since
    /// `phi'' <= 1` for `rho = 1`.
    pub fn curvature_bound(&self) -> f64 {
        let a = &self.problem.design;
        let scale = self.problem.rho.powf(-0.5);
        (a.tr_mul(a) / a.nrows() as f64)
            .symmetric_eigenvalues()
            .max()
            * scale
    }
}

impl Objective for RobustObjective {
    fn dim(&self) -> usize {
        self.problem.features()
    }

    fn value(&self, u: &DVector<f64>) -> f64 {
        let rho = self.problem.rho;
        let r = self.problem.residuals(u);
        r.iter().map(|&x| measure(rho, x)).sum::<f64>() / r.len() as f64
    }

    fn gradient(&self, u: &DVector<f64>) -> DVector<f64> {
        let rho = self.problem.rho;
        let r = self.problem.residuals(u);
        let m = r.len() as f64;
        let weights = r.map(|x| measure_derivative(rho, x) / m);
        self.problem.design.tr_mul(&weights)
    }

    fn hessian(&self, u: &DVector<f64>) -> Arc<dyn SymmetricOperator> {
        let rho = self.problem.rho;
        let a = &self.problem.design;
        let r = self.problem.residuals(u);
        let m = r.len() as f64;
        let mut scaled = a.clone();
        for (k, mut row) in scaled.row_iter_mut().enumerate() {
            row *= measure_second_derivative(rho, r[k]) / m;
        }
        let mut h = a.tr_mul(&scaled);
        // exact symmetry regardless of summation order
        h = (&h + h.transpose()) * 0.5;
        Arc::new(h)
    }
}
