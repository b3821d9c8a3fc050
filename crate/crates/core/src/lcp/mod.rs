//! Symmetric positive definite linear complementarity problems
//!
//! ```text
//! x >= 0,   y = N x + z >= 0,   <x, y> = 0.
//! ```
//!
//! [`solve_lcp`] runs the damped Newton method on the min-map from `x = 0`
//! and falls back to Lemke's algorithm when Newton declines. The returned
//! solution is polished by re-solving the linear system on its support, so
//! complementarity holds to working precision.

mod brute;
mod check;
mod damped_newton;
mod lemke;

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::norm_inf;

pub use brute::brute_force_lcp;
pub use check::{cross_check, random_spd, CrossCheck};
pub use damped_newton::{damped_newton_lcp, damped_newton_trace, DampedNewtonTrace};
pub use lemke::{lemke, lemke_with_cap, LEMKE_PIVOT_FACTOR};

/// Relative complementarity tolerance applied to every returned solution.
pub const COMPLEMENTARITY_TOL: f64 = 1e-10;

/// Default inner step cap for the damped Newton solver.
pub const DAMPED_NEWTON_MAX_STEPS: usize = 50;

/// Which side of the inactive set an LCP coordinate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignTag {
    Plus,
    Minus,
}

impl SignTag {
    pub fn sign(self) -> f64 {
        match self {
            SignTag::Plus => 1.0,
            SignTag::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcpInstance {
    pub matrix: DMatrix<f64>,
    pub q: DVector<f64>,
    /// LCP coordinate -> (original index, side).
    pub back_map: Vec<(usize, SignTag)>,
}

impl LcpInstance {
    pub fn new(matrix: DMatrix<f64>, q: DVector<f64>) -> Result<Self> {
        let m = q.len();
        Error::check_len(m, matrix.nrows())?;
        Error::check_len(m, matrix.ncols())?;
        let back_map = (0..m).map(|k| (k, SignTag::Plus)).collect();
        Ok(Self {
            matrix,
            q,
            back_map,
        })
    }

    pub fn empty() -> Self {
        Self {
            matrix: DMatrix::zeros(0, 0),
            q: DVector::zeros(0),
            back_map: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// `y = N x + z`.
    pub fn response(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.matrix * x + &self.q
    }

    /// `min{x, N x + z}` componentwise.
    pub fn min_map(&self, x: &DVector<f64>) -> DVector<f64> {
        x.zip_map(&self.response(x), f64::min)
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let scale = self.matrix.amax().max(f64::MIN_POSITIVE);
        (&self.matrix - self.matrix.transpose()).amax() <= rel_tol * scale
    }

    /// Plain-text dump (`m`, then the matrix rows, then `z`) for failure triage.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.dim());
        for i in 0..self.dim() {
            let row: Vec<String> = self
                .matrix
                .row(i)
                .iter()
                .map(|v| format!("{v:.17e}"))
                .collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        let q: Vec<String> = self.q.iter().map(|v| format!("{v:.17e}")).collect();
        let _ = writeln!(s, "{}", q.join(" "));
        s
    }

    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let bad = |what: &str| Error::Parse(format!("LCP dump: {what}"));
        let m: usize = lines
            .next()
            .ok_or_else(|| bad("missing size"))?
            .trim()
            .parse()
            .map_err(|_| bad("size"))?;
        let parse_row = |line: Option<&str>| -> Result<Vec<f64>> {
            let line = line.ok_or_else(|| bad("truncated"))?;
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| bad("number")))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != m {
                return Err(bad("row length"));
            }
            Ok(row)
        };
        let mut data = Vec::with_capacity(m * m);
        for _ in 0..m {
            data.extend(parse_row(lines.next())?);
        }
        let q = if m == 0 {
            Vec::new()
        } else {
            parse_row(lines.next())?
        };
        Self::new(DMatrix::from_row_slice(m, m, &data), DVector::from_vec(q))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LcpSolverKind {
    DampedNewton,
    Lemke,
    BruteForce,
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcpSolution {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub solver_used: LcpSolverKind,
}

impl LcpSolution {
    pub fn empty() -> Self {
        Self {
            x: DVector::zeros(0),
            y: DVector::zeros(0),
            solver_used: LcpSolverKind::Empty,
        }
    }

    /// `||min{x, y}||_inf`.
    pub fn complementarity_residual(&self) -> f64 {
        norm_inf(&self.x.zip_map(&self.y, f64::min))
    }
}

pub(crate) fn scaled_tol(inst: &LcpInstance) -> f64 {
    COMPLEMENTARITY_TOL * (1.0 + norm_inf(&inst.q))
}

/// Builds a solution from a candidate `x`: clamps it to the nonnegative orthant
/// and re-solves `N_SS x_S = -z_S` on the support `S`, keeping whichever of the
/// two has the smaller min-map residual.
pub(crate) fn finalize(
    inst: &LcpInstance,
    x: DVector<f64>,
    solver_used: LcpSolverKind,
) -> LcpSolution {
    let clamp = |v: DVector<f64>| v.map(|t| t.max(0.0));
    let x = clamp(x);
    let support: Vec<usize> = (0..x.len()).filter(|&k| x[k] > 0.0).collect();
    let mut best_x = x.clone();
    let best_res = norm_inf(&inst.min_map(&best_x));
    if !support.is_empty() {
        let sub = inst
            .matrix
            .select_rows(support.iter())
            .select_columns(support.iter());
        let rhs = -DVector::from_iterator(support.len(), support.iter().map(|&k| inst.q[k]));
        if let Some(chol) = sub.cholesky() {
            let xs = chol.solve(&rhs);
            let mut polished = DVector::zeros(x.len());
            for (&k, &v) in support.iter().zip(xs.iter()) {
                polished[k] = v;
            }
            let polished = clamp(polished);
            let res = norm_inf(&inst.min_map(&polished));
            if res <= best_res {
                best_x = polished;
            }
        }
    }
    let y = inst.response(&best_x);
    LcpSolution {
        x: best_x,
        y,
        solver_used,
    }
}

pub(crate) fn is_valid(inst: &LcpInstance, sol: &LcpSolution) -> bool {
    let tol = scaled_tol(inst);
    sol.x.iter().all(|v| v.is_finite() && *v >= -1e-12)
        && sol.y.iter().all(|v| v.is_finite() && *v >= -tol)
        && sol.complementarity_residual() <= tol
}

/// Solves an SPD LCP: damped Newton from `x = 0`, Lemke as fallback.
///
/// `tol` is the requested min-map tolerance; it is tightened to
/// [`COMPLEMENTARITY_TOL`] relative to `||z||_inf`.
pub fn solve_lcp(inst: &LcpInstance, tol: f64) -> Result<LcpSolution> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("LCP tolerance {tol}")));
    }
    if inst.is_empty() {
        return Ok(LcpSolution::empty());
    }
    if inst
        .matrix
        .iter()
        .chain(inst.q.iter())
        .any(|v| !v.is_finite())
    {
        return Err(Error::NonFinite("LCP data"));
    }
    if let Some(sol) = damped_newton_lcp(inst, tol, DAMPED_NEWTON_MAX_STEPS) {
        if is_valid(inst, &sol) {
            return Ok(sol);
        }
        log::debug!("damped Newton LCP result rejected, falling back to Lemke");
    }
    let reason = match lemke(inst, tol) {
        Ok(sol) if is_valid(inst, &sol) => return Ok(sol),
        Ok(sol) => format!(
            "Lemke result violates complementarity ({:e})",
            sol.complementarity_residual()
        ),
        Err(e) => e.to_string(),
    };
    Err(Error::Lcp {
        reason,
        dump: inst.dump(),
    })
}
