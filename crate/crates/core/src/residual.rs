//! The residual map `F`, the merit `Theta = ||F||^2`, index-set classification and
//! directional derivatives.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{all_finite, SymmetricOperator};
use crate::problem::WeightedL1Problem;

/// Componentwise `sign(v_k) * max(|v_k| - beta_k, 0)`.
pub fn soft_threshold(v: &DVector<f64>, beta: &DVector<f64>) -> Result<DVector<f64>> {
    Error::check_len(v.len(), beta.len())?;
    Ok(v.zip_map(beta, |x, b| x.signum() * (x.abs() - b).max(0.0)))
}

/// `F(u) = u - S_{gamma w}(u - gamma grad g(u))`.
pub fn residual_map(problem: &WeightedL1Problem, u: &DVector<f64>) -> Result<DVector<f64>> {
    let grad = problem.checked_gradient(u)?;
    Ok(residual_from_gradient(problem, u, &grad))
}

pub(crate) fn residual_from_gradient(
    problem: &WeightedL1Problem,
    u: &DVector<f64>,
    grad: &DVector<f64>,
) -> DVector<f64> {
    let gamma = problem.gamma();
    let w = problem.weights().as_vector();
    DVector::from_fn(u.len(), |k, _| {
        let v = u[k] - gamma * grad[k];
        let beta = gamma * w[k];
        u[k] - v.signum() * (v.abs() - beta).max(0.0)
    })
}

/// `Theta(u) = ||F(u)||_2^2`.
pub fn merit(problem: &WeightedL1Problem, u: &DVector<f64>) -> Result<f64> {
    Ok(residual_map(problem, u)?.norm_squared())
}

/// The plain, auxiliary and modified index sets at one point.
///
/// All lists are sorted ascending. The plain sets `a_plus .. i_minus` and the
/// modified sets each partition `0..n`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndexPartition {
    pub a_plus: Vec<usize>,
    pub a_minus: Vec<usize>,
    pub i_zero: Vec<usize>,
    pub i_plus: Vec<usize>,
    pub i_minus: Vec<usize>,

    pub a_plus_plus: Vec<usize>,
    pub a_minus_minus: Vec<usize>,
    pub i_zero_plus: Vec<usize>,
    pub i_zero_minus: Vec<usize>,

    pub modified_a_plus: Vec<usize>,
    pub modified_a_minus: Vec<usize>,
    pub modified_i_zero: Vec<usize>,
    pub modified_i_plus: Vec<usize>,
    pub modified_i_minus: Vec<usize>,
}

/// The four blocks that drive one Newton step.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ActiveSets {
    pub active: Vec<usize>,
    pub i_zero: Vec<usize>,
    pub i_plus: Vec<usize>,
    pub i_minus: Vec<usize>,
}

impl ActiveSets {
    pub fn lcp_size(&self) -> usize {
        self.i_plus.len() + self.i_minus.len()
    }

    pub fn inactive_len(&self) -> usize {
        self.i_zero.len() + self.lcp_size()
    }
}

/// Membership of a single coordinate in the plain sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlainSet {
    APlus,
    AMinus,
    IZero,
    IPlus,
    IMinus,
}

impl IndexPartition {
    pub fn dim(&self) -> usize {
        self.a_plus.len()
            + self.a_minus.len()
            + self.i_zero.len()
            + self.i_plus.len()
            + self.i_minus.len()
    }

    pub fn sets(&self, use_modified: bool) -> ActiveSets {
        if use_modified {
            ActiveSets {
                active: merge_sorted(&self.modified_a_plus, &self.modified_a_minus),
                i_zero: self.modified_i_zero.clone(),
                i_plus: self.modified_i_plus.clone(),
                i_minus: self.modified_i_minus.clone(),
            }
        } else {
            ActiveSets {
                active: merge_sorted(&self.a_plus, &self.a_minus),
                i_zero: self.i_zero.clone(),
                i_plus: self.i_plus.clone(),
                i_minus: self.i_minus.clone(),
            }
        }
    }

    /// `true` when the sign-inconsistent subsets are all empty, i.e. the modified
    /// sets coincide with the plain ones.
    pub fn subsets_empty(&self) -> bool {
        self.a_plus_plus.is_empty()
            && self.a_minus_minus.is_empty()
            && self.i_zero_plus.is_empty()
            && self.i_zero_minus.is_empty()
    }

    pub fn plain_labels(&self) -> Vec<PlainSet> {
        let mut labels = vec![PlainSet::IZero; self.dim()];
        for (set, tag) in [
            (&self.a_plus, PlainSet::APlus),
            (&self.a_minus, PlainSet::AMinus),
            (&self.i_plus, PlainSet::IPlus),
            (&self.i_minus, PlainSet::IMinus),
        ] {
            for &k in set {
                labels[k] = tag;
            }
        }
        labels
    }
}

fn merge_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] < b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Classifies every coordinate of `u` into the plain, auxiliary and modified
/// index sets.
pub fn classify(problem: &WeightedL1Problem, u: &DVector<f64>) -> Result<IndexPartition> {
    let grad = problem.checked_gradient(u)?;
    Ok(classify_with_gradient(problem, u, &grad))
}

/// Classification from a precomputed gradient; all comparisons use the same
/// gradient so the sets are mutually consistent.
pub fn classify_with_gradient(
    problem: &WeightedL1Problem,
    u: &DVector<f64>,
    grad: &DVector<f64>,
) -> IndexPartition {
    let gamma = problem.gamma();
    let eps = problem.boundary_tol();
    let w = problem.weights().as_vector();
    let mut p = IndexPartition::default();
    for k in 0..u.len() {
        let uk = u[k];
        let hi = gamma * grad[k] + gamma * w[k];
        let lo = gamma * grad[k] - gamma * w[k];
        if (uk - hi).abs() <= eps {
            p.i_plus.push(k);
            p.modified_i_plus.push(k);
        } else if (uk - lo).abs() <= eps {
            p.i_minus.push(k);
            p.modified_i_minus.push(k);
        } else if hi < uk {
            p.a_plus.push(k);
            if uk < 0.0 {
                p.a_plus_plus.push(k);
                p.modified_i_plus.push(k);
            } else {
                p.modified_a_plus.push(k);
            }
        } else if uk < lo {
            p.a_minus.push(k);
            if 0.0 < uk {
                p.a_minus_minus.push(k);
                p.modified_i_minus.push(k);
            } else {
                p.modified_a_minus.push(k);
            }
        } else {
            p.i_zero.push(k);
            if hi < 0.0 {
                p.i_zero_plus.push(k);
                p.modified_i_plus.push(k);
            } else if 0.0 < lo {
                p.i_zero_minus.push(k);
                p.modified_i_minus.push(k);
            } else {
                p.modified_i_zero.push(k);
            }
        }
    }
    p
}

/// Directional derivative `F'(u; d)` built from the plain index sets.
pub fn dir_derivative_f(
    problem: &WeightedL1Problem,
    u: &DVector<f64>,
    d: &DVector<f64>,
) -> Result<DVector<f64>> {
    Error::check_len(problem.dim(), d.len())?;
    let grad = problem.checked_gradient(u)?;
    let partition = classify_with_gradient(problem, u, &grad);
    let hessian = problem.objective().hessian(u);
    Ok(dir_derivative_from_parts(
        problem.gamma(),
        &partition,
        hessian.as_ref(),
        d,
    ))
}

pub(crate) fn dir_derivative_from_parts(
    gamma: f64,
    partition: &IndexPartition,
    hessian: &dyn SymmetricOperator,
    d: &DVector<f64>,
) -> DVector<f64> {
    let md = hessian.mul_vec(d) * gamma;
    let mut out = d.clone();
    for &k in partition.a_plus.iter().chain(&partition.a_minus) {
        out[k] = md[k];
    }
    for &k in &partition.i_plus {
        out[k] = md[k].min(d[k]);
    }
    for &k in &partition.i_minus {
        out[k] = md[k].max(d[k]);
    }
    out
}

/// `Theta'(u; d) = 2 <F'(u; d), F(u)>`.
pub fn dir_derivative_merit(
    problem: &WeightedL1Problem,
    u: &DVector<f64>,
    d: &DVector<f64>,
) -> Result<f64> {
    Error::check_len(problem.dim(), d.len())?;
    let grad = problem.checked_gradient(u)?;
    let f = residual_from_gradient(problem, u, &grad);
    let partition = classify_with_gradient(problem, u, &grad);
    let hessian = problem.objective().hessian(u);
    let fd = dir_derivative_from_parts(problem.gamma(), &partition, hessian.as_ref(), d);
    let value = 2.0 * fd.dot(&f);
    if all_finite(&fd) {
        Ok(value)
    } else {
        Err(Error::NonFinite("Hessian"))
    }
}
