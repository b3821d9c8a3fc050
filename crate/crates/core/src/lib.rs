//! B-semismooth Newton solvers for
//!
//! ```text
//! min_u  g(u) + sum_k w_k |u_k|
//! ```
//!
//! with `g` strictly convex and twice differentiable.
//!
//! The minimizer is the unique zero of the residual map
//! `F(u) = u - S_{gamma w}(u - gamma grad g(u))`. Each Newton step classifies the
//! coordinates into active and inactive index sets, eliminates the active block
//! by a Schur complement and solves the remaining symmetric positive definite
//! linear complementarity problem exactly. Steps are globalized with an Armijo
//! rule on the merit `||F(u)||^2`.
//!
//! Three drivers are provided (see [`newton::Variant`]):
//! - `Bssn` uses the plain index sets,
//! - `ModBssn` uses the modified index sets and converges globally,
//! - `Hybrid` starts as `Bssn` and switches permanently to the modified sets
//!   once the iteration stagnates.
//!
//! ```
//! use bssn_core::prelude::*;
//! use nalgebra::{DMatrix, DVector};
//!
//! let k = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
//! let f = DVector::from_vec(vec![1.0, -2.0, 0.5]);
//! let objective = QuadraticObjective::dense(k, f).unwrap();
//! let problem = WeightedL1Problem::new(objective, WeightVector::uniform(2, 0.1).unwrap(), 1.0).unwrap();
//! let result = solve(&problem, &DVector::zeros(2), &SolverConfig::default()).unwrap();
//! assert!(result.converged);
//! ```

pub mod error;
pub mod experiments;
pub mod lcp;
pub mod linalg;
pub mod newton;
pub mod objectives;
pub mod problem;
pub mod residual;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::lcp::{solve_lcp, LcpInstance, LcpSolution, LcpSolverKind};
    pub use crate::linalg::SymmetricOperator;
    pub use crate::newton::{solve, IterationRecord, SolveResult, SolverConfig, Variant};
    pub use crate::objectives::{
        BlurOperator, QuadraticObjective, RegressionProblem, RobustObjective,
    };
    pub use crate::problem::{Objective, WeightVector, WeightedL1Problem};
    pub use crate::residual::{classify, merit, residual_map, soft_threshold, IndexPartition};
}
