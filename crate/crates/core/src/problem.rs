//! Problem definition: smooth part `g`, positive weights `w` and the scaling `gamma`.

use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::SymmetricOperator;

/// The smooth, strictly convex part `g` of the objective.
///
/// Implementations must be reentrant; the solvers may share one objective
/// across threads.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, u: &DVector<f64>) -> f64;

    fn gradient(&self, u: &DVector<f64>) -> DVector<f64>;

    fn hessian(&self, u: &DVector<f64>) -> Arc<dyn SymmetricOperator>;

    /// `true` when `hessian` does not depend on `u`, so callers may evaluate it once.
    fn has_constant_hessian(&self) -> bool {
        false
    }
}

/// Per-coordinate regularization weights, all bounded below by a positive `w_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    values: DVector<f64>,
    lower_bound: f64,
}

impl WeightVector {
    pub fn new(values: DVector<f64>) -> Result<Self> {
        let lower_bound = values.iter().copied().fold(f64::INFINITY, f64::min);
        if values.is_empty() {
            return Err(Error::InvalidParameter("weight vector is empty".into()));
        }
        if !(lower_bound > 0.0 && lower_bound.is_finite()) || values.iter().any(|w| !w.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "weights must be finite and positive, minimum is {lower_bound}"
            )));
        }
        Ok(Self {
            values,
            lower_bound,
        })
    }

    pub fn uniform(n: usize, w: f64) -> Result<Self> {
        Self::new(DVector::from_element(n, w))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn lower_bound(&self) -> f64 {
        self.lower_bound
    }
}

/// `min g(u) + sum_k w_k |u_k|` together with the residual scaling `gamma`.
///
/// Cloning is cheap; the objective is shared.
#[derive(Clone)]
pub struct WeightedL1Problem {
    objective: Arc<dyn Objective>,
    weights: WeightVector,
    gamma: f64,
    boundary_tol: f64,
}

impl std::fmt::Debug for WeightedL1Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WeightedL1Problem")
            .field("dim", &self.dim())
            .field("gamma", &self.gamma)
            .field("boundary_tol", &self.boundary_tol)
            .finish()
    }
}

impl WeightedL1Problem {
    pub fn new<O: Objective + 'static>(
        objective: O,
        weights: WeightVector,
        gamma: f64,
    ) -> Result<Self> {
        Self::from_arc(Arc::new(objective), weights, gamma)
    }

    pub fn from_arc(
        objective: Arc<dyn Objective>,
        weights: WeightVector,
        gamma: f64,
    ) -> Result<Self> {
        Error::check_len(objective.dim(), weights.len())?;
        validate_gamma(gamma)?;
        Ok(Self {
            objective,
            weights,
            gamma,
            boundary_tol: 0.0,
        })
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        validate_gamma(gamma)?;
        Ok(Self {
            gamma,
            ..self.clone()
        })
    }

    pub fn with_weights(&self, weights: WeightVector) -> Result<Self> {
        Error::check_len(self.dim(), weights.len())?;
        Ok(Self {
            weights,
            ..self.clone()
        })
    }

    /// Widens the boundary sets `I+`/`I-` to `|u_k - (gamma g_k +- gamma w_k)| <= tol`.
    /// The default is exact equality.
    pub fn with_boundary_tolerance(&self, tol: f64) -> Result<Self> {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("boundary tolerance {tol}")));
        }
        Ok(Self {
            boundary_tol: tol,
            ..self.clone()
        })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn boundary_tol(&self) -> f64 {
        self.boundary_tol
    }

    pub fn objective(&self) -> &Arc<dyn Objective> {
        &self.objective
    }

    /// `g(u) + sum_k w_k |u_k|`.
    pub fn penalized_value(&self, u: &DVector<f64>) -> f64 {
        let penalty: f64 = u
            .iter()
            .zip(self.weights.values.iter())
            .map(|(x, w)| w * x.abs())
            .sum();
        self.objective.value(u) + penalty
    }

    pub(crate) fn checked_gradient(&self, u: &DVector<f64>) -> Result<DVector<f64>> {
        Error::check_len(self.dim(), u.len())?;
        let g = self.objective.gradient(u);
        Error::check_len(self.dim(), g.len())?;
        if g.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("gradient"));
        }
        Ok(g)
    }
}

fn validate_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "gamma must be positive, got {gamma}"
        )))
    }
}

/// Observed Hessian bounds on a set of sample points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianBounds {
    pub min_rayleigh: f64,
    pub max_rayleigh: f64,
    pub max_asymmetry: f64,
}

/// Samples `Hessian(u)` at the given points and reports the extreme Rayleigh
/// quotients together with the largest relative asymmetry. Intended for
/// desk-scale checks; it materializes the Hessian densely.
pub fn sample_hessian_bounds(objective: &dyn Objective, points: &[DVector<f64>]) -> HessianBounds {
    let mut out = HessianBounds {
        min_rayleigh: f64::INFINITY,
        max_rayleigh: 0.0,
        max_asymmetry: 0.0,
    };
    for u in points {
        let h = objective.hessian(u).to_dense();
        let scale = h.amax().max(f64::MIN_POSITIVE);
        out.max_asymmetry = out.max_asymmetry.max((&h - h.transpose()).amax() / scale);
        let sym = (&h + h.transpose()) * 0.5;
        let eig = sym.symmetric_eigenvalues();
        out.min_rayleigh = out.min_rayleigh.min(eig.min());
        out.max_rayleigh = out.max_rayleigh.max(eig.max());
    }
    out
}
