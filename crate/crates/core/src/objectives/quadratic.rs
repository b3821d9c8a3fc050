use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{Shifted, SymmetricOperator};
use crate::objectives::LinearMap;
use crate::problem::Objective;

/// `g(u) = 1/2 ||K u - f||^2 + alpha/2 ||u||^2` with the constant Hessian
/// `K^T K + alpha I` cached. `alpha` is zero unless set with
/// [`QuadraticObjective::with_ridge`].
#[derive(Clone)]
pub struct QuadraticObjective {
    operator: Arc<dyn LinearMap>,
    data: DVector<f64>,
    ridge: f64,
    gram: Arc<dyn SymmetricOperator>,
}

impl std::fmt::Debug for QuadraticObjective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuadraticObjective")
            .field("rows", &self.operator.nrows())
            .field("cols", &self.operator.ncols())
            .finish()
    }
}

impl QuadraticObjective {
    pub fn new<K: LinearMap + 'static>(operator: K, data: DVector<f64>) -> Result<Self> {
        Error::check_len(operator.nrows(), data.len())?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("data vector"));
        }
        let gram = operator.gram();
        Ok(Self {
            operator: Arc::new(operator),
            data,
            ridge: 0.0,
            gram,
        })
    }

    /// Adds `alpha/2 ||u||^2`, which makes the Hessian positive definite when
    /// `K` has a nontrivial kernel.
    pub fn with_ridge(mut self, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ridge must be finite and nonnegative, got {alpha}"
            )));
        }
        if alpha > 0.0 {
            let inner = if self.ridge == 0.0 {
                Arc::clone(&self.gram)
            } else {
                self.operator.gram()
            };
            self.gram = Arc::new(Shifted {
                inner,
                shift: alpha,
            });
        }
        self.ridge = alpha;
        Ok(self)
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn dense(k: DMatrix<f64>, f: DVector<f64>) -> Result<Self> {
        Self::new(k, f)
    }

    pub fn operator(&self) -> &Arc<dyn LinearMap> {
        &self.operator
    }

    pub fn data(&self) -> &DVector<f64> {
        &self.data
    }

    /// `K u - f`.
    pub fn misfit(&self, u: &DVector<f64>) -> DVector<f64> {
        self.operator.apply(u) - &self.data
    }
}

impl Objective for QuadraticObjective {
    fn dim(&self) -> usize {
        self.operator.ncols()
    }

    fn value(&self, u: &DVector<f64>) -> f64 {
        0.5 * (self.misfit(u).norm_squared() + self.ridge * u.norm_squared())
    }

    fn gradient(&self, u: &DVector<f64>) -> DVector<f64> {
        let g = self.operator.apply_transpose(&self.misfit(u));
        if self.ridge > 0.0 {
            g + u * self.ridge
        } else {
            g
        }
    }

    fn hessian(&self, _u: &DVector<f64>) -> Arc<dyn SymmetricOperator> {
        Arc::clone(&self.gram)
    }

    fn has_constant_hessian(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::BlurOperator;
    use crate::problem::sample_hessian_bounds;
    use rand::{Rng, SeedableRng};

    #[test]
    fn exact_fit_has_zero_value_and_gradient() {
        let k = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 0.0, 1.0, 3.0, -1.0]);
        let u = DVector::from_vec(vec![0.5, -1.5]);
        let obj = QuadraticObjective::dense(k.clone(), &k * &u).unwrap();
        assert_eq!(obj.value(&u), 0.0);
        assert_eq!(obj.gradient(&u), DVector::zeros(2));
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let k = DMatrix::from_fn(7, 5, |_, _| rng.random_range(-1.0..1.0));
        let f = DVector::from_fn(7, |_, _| rng.random_range(-1.0..1.0));
        let obj = QuadraticObjective::dense(k, f).unwrap();
        let u = DVector::from_fn(5, |_, _| rng.random_range(-1.0..1.0));
        let g = obj.gradient(&u);
        let h = 1e-5;
        for i in 0..5 {
            let mut e = DVector::zeros(5);
            e[i] = h;
            let fd = (obj.value(&(&u + &e)) - obj.value(&(&u - &e))) / (2.0 * h);
            assert!((fd - g[i]).abs() <= 1e-6 * g[i].abs().max(1.0));
        }
    }

    #[test]
    fn hessian_bounds_match_singular_values() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let k = DMatrix::from_fn(9, 4, |_, _| rng.random_range(-1.0..1.0));
        let sv = k.clone().svd(false, false).singular_values;
        let obj = QuadraticObjective::dense(k, DVector::zeros(9)).unwrap();
        let bounds = sample_hessian_bounds(&obj, &[DVector::zeros(4)]);
        assert!((bounds.min_rayleigh - sv.min().powi(2)).abs() < 1e-10);
        assert!((bounds.max_rayleigh - sv.max().powi(2)).abs() < 1e-10);
        assert!(bounds.max_asymmetry < 1e-14);
        assert!(bounds.min_rayleigh > 0.0);
    }

    #[test]
    fn blur_objective_uses_structured_hessian() {
        let op = BlurOperator::new(6, 0.2).unwrap();
        let dense = op.to_dense();
        let f = DVector::from_fn(36, |k, _| (k as f64).cos());
        let obj = QuadraticObjective::new(op, f.clone()).unwrap();
        let reference = QuadraticObjective::dense(dense, f).unwrap();
        let u = DVector::from_fn(36, |k, _| (k as f64 * 0.1).sin());
        assert!((obj.gradient(&u) - reference.gradient(&u)).amax() < 1e-13);
        assert!((obj.hessian(&u).to_dense() - reference.hessian(&u).to_dense()).amax() < 1e-14);
        assert!(obj.has_constant_hessian());
    }

    #[test]
    fn ridge_shifts_value_gradient_and_hessian() {
        let op = BlurOperator::new(5, 0.2).unwrap();
        let dense = op.to_dense();
        let f = DVector::from_fn(25, |k, _| (k as f64 * 0.7).sin());
        let obj = QuadraticObjective::new(op, f.clone())
            .unwrap()
            .with_ridge(0.25)
            .unwrap();
        let u = DVector::from_fn(25, |k, _| (k as f64 * 0.3).cos());
        let r = &dense * &u - &f;
        assert!((obj.value(&u) - 0.5 * (r.norm_squared() + 0.25 * u.norm_squared())).abs() < 1e-13);
        assert!((obj.gradient(&u) - (dense.transpose() * r + &u * 0.25)).amax() < 1e-13);
        let h = obj.hessian(&u);
        let expected = dense.transpose() * &dense + DMatrix::identity(25, 25) * 0.25;
        assert!((h.to_dense() - &expected).amax() < 1e-14);
        assert!((h.mul_vec(&u) - &expected * &u).amax() < 1e-13);
        let idx = [0, 3, 7, 12];
        let cols = [3, 4, 12];
        assert!(
            (h.submatrix(&idx, &cols)
                - expected.select_rows(idx.iter()).select_columns(cols.iter()))
            .amax()
                < 1e-14
        );
        assert!(QuadraticObjective::dense(dense, f)
            .unwrap()
            .with_ridge(-1.0)
            .is_err());
    }
}
