//! Concrete smooth objectives: the quadratic data-fit term `1/2 ||K u - f||^2`
//! and the robust L1-L2 regression loss.

mod blur;
pub mod io;
mod quadratic;
mod robust;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::linalg::SymmetricOperator;

pub use blur::{
    blur_half_width, forward_blur_simpson, simpson_weights, toeplitz_factor, BlurOperator,
    KroneckerGram,
};
pub use quadratic::QuadraticObjective;
pub use robust::{
    measure, measure_derivative, measure_second_derivative, RegressionProblem, RobustObjective,
};

/// A linear forward operator `K`.
pub trait LinearMap: Send + Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn apply(&self, u: &DVector<f64>) -> DVector<f64>;
    fn apply_transpose(&self, v: &DVector<f64>) -> DVector<f64>;
    /// `K^T K`.
    fn gram(&self) -> Arc<dyn SymmetricOperator>;
}

impl LinearMap for DMatrix<f64> {
    fn nrows(&self) -> usize {
        self.nrows()
    }

    fn ncols(&self) -> usize {
        self.ncols()
    }

    fn apply(&self, u: &DVector<f64>) -> DVector<f64> {
        self * u
    }

    fn apply_transpose(&self, v: &DVector<f64>) -> DVector<f64> {
        self.tr_mul(v)
    }

    fn gram(&self) -> Arc<dyn SymmetricOperator> {
        Arc::new(self.tr_mul(self))
    }
}
