//! Schur-complement reduction of the generalized Newton equation to an LCP on
//! the boundary sets, and recovery of the full direction.
//!
//! With `A` the active set, `Z` the inactive-zero set and `L = P ++ Q` the plus
//! and minus boundary sets, the direction satisfies
//!
//! ```text
//! gamma (M d)_A = -F_A,   d_Z = -u_Z,   d_P = x_P - u_P,   d_Q = -x_Q - u_Q,
//! ```
//!
//! and `x` solves the LCP with `N = gamma D S D`, where `S` is the Schur
//! complement of `M_AA` in `M_{A+L, A+L}` and `D = diag(+1 on P, -1 on Q)`.
//! One factorization of `M_AA` serves `|L| + 1` right-hand sides.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lcp::{LcpInstance, LcpSolution, SignTag};
use crate::linalg::{all_finite, gather, BlockCholesky, SymmetricOperator};
use crate::residual::ActiveSets;

/// Everything needed to turn an LCP solution into a Newton direction.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub sets: ActiveSets,
    pub lcp: LcpInstance,
    gamma: f64,
    factor: Option<BlockCholesky>,
    /// `M_AA^{-1} M_AL`.
    schur_columns: DMatrix<f64>,
    /// `M_AA^{-1} (gamma M_AZ u_Z - F_A)`.
    base: DVector<f64>,
    /// Number of right-hand sides solved with the factorization.
    pub solve_count: usize,
}

impl ReducedSystem {
    pub fn build(
        hessian: &dyn SymmetricOperator,
        u: &DVector<f64>,
        residual: &DVector<f64>,
        sets: ActiveSets,
        gamma: f64,
    ) -> Result<Self> {
        let n = u.len();
        Error::check_len(hessian.dim(), n)?;
        let active = &sets.active;
        let lcp_idx: Vec<usize> = sets.i_plus.iter().chain(&sets.i_minus).copied().collect();
        let signs: Vec<f64> = sets
            .i_plus
            .iter()
            .map(|_| 1.0)
            .chain(sets.i_minus.iter().map(|_| -1.0))
            .collect();
        let m = lcp_idx.len();

        // M u~ with u~ = u on Z and zero elsewhere
        let mut u_zero = DVector::zeros(n);
        for &k in &sets.i_zero {
            u_zero[k] = u[k];
        }
        let m_uz = if sets.i_zero.is_empty() {
            DVector::zeros(n)
        } else {
            hessian.mul_vec(&u_zero)
        };
        if !all_finite(&m_uz) {
            return Err(Error::NonFinite("Hessian"));
        }

        let (factor, schur_columns, base, m_la, solve_count) = if active.is_empty() {
            (
                None,
                DMatrix::zeros(0, m),
                DVector::zeros(0),
                DMatrix::zeros(m, 0),
                0,
            )
        } else {
            let m_aa = hessian.submatrix(active, active);
            let factor = BlockCholesky::new(&m_aa)?;
            let rhs = gather(&m_uz, active) * gamma - gather(residual, active);
            let base = factor.solve_vec(&rhs);
            let (cols, m_la) = if m > 0 {
                let m_al = hessian.submatrix(active, &lcp_idx);
                if m_al.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite("Hessian"));
                }
                (factor.solve(&m_al), m_al.transpose())
            } else {
                (
                    DMatrix::zeros(active.len(), 0),
                    DMatrix::zeros(0, active.len()),
                )
            };
            (Some(factor), cols, base, m_la, m + 1)
        };

        let lcp = if m == 0 {
            LcpInstance::empty()
        } else {
            let m_ll = hessian.submatrix(&lcp_idx, &lcp_idx);
            let schur = if active.is_empty() {
                m_ll
            } else {
                m_ll - &m_la * &schur_columns
            };
            if schur.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("Hessian"));
            }
            let mut n_mat =
                DMatrix::from_fn(m, m, |i, j| gamma * signs[i] * signs[j] * schur[(i, j)]);
            n_mat = (&n_mat + n_mat.transpose()) * 0.5;
            // c = M_LA base - gamma (M u~)_L + F_L ;  z = D (c - gamma S u_L)
            let mut c = gather(residual, &lcp_idx) - gather(&m_uz, &lcp_idx) * gamma;
            if !active.is_empty() {
                c += &m_la * &base;
            }
            let s_ul = &schur * gather(u, &lcp_idx);
            let q = DVector::from_fn(m, |i, _| signs[i] * (c[i] - gamma * s_ul[i]));
            let back_map = sets
                .i_plus
                .iter()
                .map(|&k| (k, SignTag::Plus))
                .chain(sets.i_minus.iter().map(|&k| (k, SignTag::Minus)))
                .collect();
            LcpInstance {
                matrix: n_mat,
                q,
                back_map,
            }
        };

        Ok(Self {
            sets,
            lcp,
            gamma,
            factor,
            schur_columns,
            base,
            solve_count,
        })
    }

    /// Dimension of the factored active block.
    pub fn active_size(&self) -> usize {
        self.factor.as_ref().map_or(0, BlockCholesky::dim)
    }

    /// Recovers the full direction from the LCP solution without further solves.
    pub fn direction(&self, u: &DVector<f64>, solution: &LcpSolution) -> Result<DVector<f64>> {
        Error::check_len(self.lcp.dim(), solution.x.len())?;
        let mut d = DVector::zeros(u.len());
        for &k in &self.sets.i_zero {
            d[k] = -u[k];
        }
        let mut d_l = DVector::zeros(self.lcp.dim());
        for (i, &(k, tag)) in self.lcp.back_map.iter().enumerate() {
            let v = tag.sign() * solution.x[i] - u[k];
            d[k] = v;
            d_l[i] = v;
        }
        if !self.sets.active.is_empty() {
            let mut d_a = &self.base / self.gamma;
            if !d_l.is_empty() {
                d_a -= &self.schur_columns * &d_l;
            }
            for (&k, &v) in self.sets.active.iter().zip(d_a.iter()) {
                d[k] = v;
            }
        }
        if all_finite(&d) {
            Ok(d)
        } else {
            Err(Error::NonFinite("Newton direction"))
        }
    }
}
