//! Dense helpers shared by the solvers.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// A symmetric `n x n` matrix that may be stored implicitly.
///
/// Hessians are exposed through this trait so that structured objectives
/// (e.g. Kronecker-product Gram matrices) never have to materialize the full
/// dense matrix. The Newton solver only ever asks for principal and
/// off-diagonal sub-blocks and matrix-vector products.
pub trait SymmetricOperator: Send + Sync {
    fn dim(&self) -> usize;

    fn entry(&self, i: usize, j: usize) -> f64;

    fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = self.dim();
        DVector::from_fn(n, |i, _| (0..n).map(|j| self.entry(i, j) * x[j]).sum())
    }

    fn submatrix(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), cols.len(), |r, c| self.entry(rows[r], cols[c]))
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.entry(i, j))
    }
}

impl SymmetricOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        self[(i, j)]
    }

    fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        self * x
    }

    fn submatrix(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        self.select_rows(rows.iter()).select_columns(cols.iter())
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.clone()
    }
}

/// `A + shift I`.
pub struct Shifted {
    pub inner: std::sync::Arc<dyn SymmetricOperator>,
    pub shift: f64,
}

impl SymmetricOperator for Shifted {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        self.inner.entry(i, j) + if i == j { self.shift } else { 0.0 }
    }

    fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        self.inner.mul_vec(x) + x * self.shift
    }

    fn submatrix(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        let mut out = self.inner.submatrix(rows, cols);
        for (r, &i) in rows.iter().enumerate() {
            for (c, &j) in cols.iter().enumerate() {
                if i == j {
                    out[(r, c)] += self.shift;
                }
            }
        }
        out
    }
}

pub fn gather(v: &DVector<f64>, idx: &[usize]) -> DVector<f64> {
    DVector::from_iterator(idx.len(), idx.iter().map(|&k| v[k]))
}

pub fn scatter(target: &mut DVector<f64>, idx: &[usize], values: &DVector<f64>) {
    for (&k, &v) in idx.iter().zip(values.iter()) {
        target[k] = v;
    }
}

pub fn norm_inf(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn all_finite(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Cholesky factorization that splits the matrix into its decoupled diagonal
/// blocks first.
///
/// Connectivity is read off the exact nonzero pattern. Dense matrices end up as
/// a single block; block-diagonal ones (Kronecker structure, separable
/// problems) are factored block by block.
#[derive(Debug, Clone)]
pub struct BlockCholesky {
    dim: usize,
    blocks: Vec<(Vec<usize>, Cholesky<f64, Dyn>)>,
}

impl BlockCholesky {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        Error::check_len(n, a.ncols())?;
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("Hessian block"));
        }
        let components = connected_components(a);
        let mut blocks = Vec::with_capacity(components.len());
        for idx in components {
            let sub = if idx.len() == n {
                a.clone()
            } else {
                a.select_rows(idx.iter()).select_columns(idx.iter())
            };
            let chol = Cholesky::new(sub).ok_or(Error::NotPositiveDefinite(n))?;
            blocks.push((idx, chol));
        }
        Ok(Self { dim: n, blocks })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn solve(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        assert_eq!(b.nrows(), self.dim);
        if self.blocks.len() == 1 && self.blocks[0].0.len() == self.dim {
            return self.blocks[0].1.solve(b);
        }
        let mut out = DMatrix::zeros(self.dim, b.ncols());
        for (idx, chol) in &self.blocks {
            let rhs = b.select_rows(idx.iter());
            let sol = chol.solve(&rhs);
            for (r, &k) in idx.iter().enumerate() {
                out.row_mut(k).copy_from(&sol.row(r));
            }
        }
        out
    }

    pub fn solve_vec(&self, b: &DVector<f64>) -> DVector<f64> {
        let m = DMatrix::from_column_slice(b.len(), 1, b.as_slice());
        DVector::from_column_slice(self.solve(&m).as_slice())
    }
}

fn connected_components(a: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = a.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for j in 0..n {
        let col = a.column(j);
        for i in (j + 1)..n {
            if col[i] != 0.0 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        let r = find(&mut parent, k);
        if label[r] == usize::MAX {
            label[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[label[r]].push(k);
    }
    comps
}
