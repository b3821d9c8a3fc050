//! Horizontal motion blur on `N x N` images.
//!
//! Images are stored as column-major stacks of length `N^2` (index
//! `col * N + row`), so the Kronecker product `T (x) I` averages along rows.
//! `T` is the symmetric banded Toeplitz matrix with `2b + 1` ones per full row
//! scaled by `1 / (2b + 1)`, where `b = floor(N L)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::SymmetricOperator;
use crate::objectives::LinearMap;

#[derive(Debug, Clone, PartialEq)]
pub struct BlurOperator {
    side: usize,
    half_width: usize,
    factor: DMatrix<f64>,
}

pub fn blur_half_width(side: usize, length: f64) -> usize {
    (side as f64 * length).floor() as usize
}

/// Normalized banded Toeplitz factor of the blur operator.
pub fn toeplitz_factor(side: usize, half_width: usize) -> DMatrix<f64> {
    let scale = 1.0 / (2 * half_width + 1) as f64;
    DMatrix::from_fn(side, side, |i, j| {
        if i.abs_diff(j) <= half_width {
            scale
        } else {
            0.0
        }
    })
}

impl BlurOperator {
    pub fn new(side: usize, length: f64) -> Result<Self> {
        if side < 2 {
            return Err(Error::InvalidParameter(format!(
                "image side must be at least 2, got {side}"
            )));
        }
        if !(length > 0.0 && length < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "blur length must lie in (0, 1), got {length}"
            )));
        }
        let half_width = blur_half_width(side, length);
        if half_width == 0 {
            log::warn!("blur bandwidth collapses to 1 (N = {side}, L = {length}); operator is the identity");
        }
        Ok(Self {
            side,
            half_width,
            factor: toeplitz_factor(side, half_width),
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    /// Dense `N^2 x N^2` matrix. Only sensible for small images.
    pub fn to_dense(&self) -> DMatrix<f64> {
        self.factor
            .kronecker(&DMatrix::<f64>::identity(self.side, self.side))
    }

    /// Right-multiplies the image stack by a symmetric `N x N` factor.
    fn apply_factor(&self, factor: &DMatrix<f64>, u: &DVector<f64>) -> DVector<f64> {
        let n = self.side;
        let image = DMatrix::from_column_slice(n, n, u.as_slice());
        let out = image * factor;
        DVector::from_column_slice(out.as_slice())
    }
}

impl LinearMap for BlurOperator {
    fn nrows(&self) -> usize {
        self.side * self.side
    }

    fn ncols(&self) -> usize {
        self.side * self.side
    }

    fn apply(&self, u: &DVector<f64>) -> DVector<f64> {
        self.apply_factor(&self.factor, u)
    }

    fn apply_transpose(&self, v: &DVector<f64>) -> DVector<f64> {
        self.apply_factor(&self.factor, v)
    }

    fn gram(&self) -> std::sync::Arc<dyn SymmetricOperator> {
        std::sync::Arc::new(KroneckerGram {
            side: self.side,
            factor: &self.factor * &self.factor,
        })
    }
}

/// `F (x) I` for a symmetric `N x N` factor `F`, without materializing it.
#[derive(Debug, Clone)]
pub struct KroneckerGram {
    side: usize,
    factor: DMatrix<f64>,
}

impl SymmetricOperator for KroneckerGram {
    fn dim(&self) -> usize {
        self.side * self.side
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        let n = self.side;
        if i % n == j % n {
            self.factor[(i / n, j / n)]
        } else {
            0.0
        }
    }

    fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = self.side;
        let image = DMatrix::from_column_slice(n, n, x.as_slice());
        DVector::from_column_slice((image * &self.factor).as_slice())
    }

    fn submatrix(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        let n = self.side;
        let mut out = DMatrix::zeros(rows.len(), cols.len());
        // bucket columns by their row-within-image so each entry lookup is O(1)
        let mut by_lane: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (c, &j) in cols.iter().enumerate() {
            by_lane[j % n].push((c, j / n));
        }
        for (r, &i) in rows.iter().enumerate() {
            let ci = i / n;
            for &(c, cj) in &by_lane[i % n] {
                out[(r, c)] = self.factor[(ci, cj)];
            }
        }
        out
    }
}

/// Simpson-weighted moving average over the same `2b + 1` window as the blur
/// operator, normalized to unit mass and truncated at the image border. Used
/// only to synthesize data, so that the reconstruction does not reuse the
/// forward discretization.
pub fn forward_blur_simpson(side: usize, length: f64, u: &DVector<f64>) -> Result<DVector<f64>> {
    Error::check_len(side * side, u.len())?;
    let op = BlurOperator::new(side, length)?;
    let weights = simpson_weights(op.half_width());
    let b = op.half_width() as isize;
    let factor = DMatrix::from_fn(side, side, |i, j| {
        let offset = j as isize - i as isize;
        if offset.abs() <= b {
            weights[(offset + b) as usize]
        } else {
            0.0
        }
    });
    Ok(op.apply_factor(&factor.transpose(), u))
}

/// Composite Simpson weights over `2b + 1` points, normalized to sum 1.
pub fn simpson_weights(half_width: usize) -> Vec<f64> {
    let len = 2 * half_width + 1;
    if len < 3 {
        log::warn!("blur window has a single point; Simpson weights reduce to the identity");
        return vec![1.0];
    }
    let raw: Vec<f64> = (0..len)
        .map(|k| {
            if k == 0 || k == len - 1 {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            }
        })
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}
