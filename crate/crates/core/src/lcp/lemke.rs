//! Lemke's complementary pivoting with covering vector `e = (1, ..., 1)` and a
//! lexicographic ratio test.
//!
//! Tableau columns: `w_0..w_{m-1}`, `x_0..x_{m-1}`, `z0`, right-hand side, for
//! the system `w - N x - e z0 = q`. The `w` columns hold the current basis
//! inverse, which is what the lexicographic rule compares.

use nalgebra::{DMatrix, DVector};

use super::{finalize, LcpInstance, LcpSolution, LcpSolverKind};
use crate::error::{Error, Result};
use crate::linalg::norm_inf;

/// Pivot cap is `LEMKE_PIVOT_FACTOR * (m + 1)`.
pub const LEMKE_PIVOT_FACTOR: usize = 50;

pub fn lemke(inst: &LcpInstance, tol: f64) -> Result<LcpSolution> {
    lemke_with_cap(inst, tol, LEMKE_PIVOT_FACTOR * (inst.dim() + 1)).map(|(sol, _)| sol)
}

/// Returns the solution and the number of pivots performed.
pub fn lemke_with_cap(
    inst: &LcpInstance,
    tol: f64,
    max_pivots: usize,
) -> Result<(LcpSolution, usize)> {
    let m = inst.dim();
    if m == 0 {
        return Ok((LcpSolution::empty(), 0));
    }
    if inst.q.iter().all(|&v| v >= 0.0) {
        let x = DVector::zeros(m);
        let y = inst.q.clone();
        return Ok((
            LcpSolution {
                x,
                y,
                solver_used: LcpSolverKind::Lemke,
            },
            0,
        ));
    }
    let fail = |reason: String| Error::Lcp {
        reason,
        dump: inst.dump(),
    };

    let z0 = 2 * m;
    let rhs = 2 * m + 1;
    let mut tab = DMatrix::<f64>::zeros(m, 2 * m + 2);
    for i in 0..m {
        tab[(i, i)] = 1.0;
        for j in 0..m {
            tab[(i, m + j)] = -inst.matrix[(i, j)];
        }
        tab[(i, z0)] = -1.0;
        tab[(i, rhs)] = inst.q[i];
    }
    let mut basis: Vec<usize> = (0..m).collect();
    let scale = inst.matrix.amax().max(norm_inf(&inst.q)).max(1.0);
    let eps = 1e-12 * scale;

    // z0 enters; the row with the lexicographically smallest (q_i, B^-1_i) leaves
    let all_rows: Vec<usize> = (0..m).collect();
    let r = lex_min(&tab, &all_rows, |_| 1.0, rhs, m, eps);
    let mut leaving = basis[r];
    pivot(&mut tab, r, z0);
    basis[r] = z0;
    let mut pivots = 1;

    loop {
        if pivots >= max_pivots {
            return Err(fail(format!("Lemke exceeded {max_pivots} pivots")));
        }
        let entering = if leaving < m {
            leaving + m
        } else {
            leaving - m
        };
        let candidates: Vec<usize> = (0..m).filter(|&i| tab[(i, entering)] > eps).collect();
        if candidates.is_empty() {
            return Err(fail("Lemke terminated on a secondary ray".into()));
        }
        let r = match candidates.iter().copied().find(|&i| basis[i] == z0) {
            // z0 leaves as soon as it is among the minimum ratio rows
            Some(i) if is_min_ratio(&tab, &candidates, i, entering, rhs, eps) => i,
            _ => lex_min(&tab, &candidates, |i| tab[(i, entering)], rhs, m, eps),
        };
        leaving = basis[r];
        pivot(&mut tab, r, entering);
        basis[r] = entering;
        pivots += 1;
        if leaving == z0 {
            break;
        }
    }

    let mut x = DVector::zeros(m);
    for (i, &b) in basis.iter().enumerate() {
        if (m..2 * m).contains(&b) {
            x[b - m] = tab[(i, rhs)];
        }
    }
    let sol = finalize(inst, x, LcpSolverKind::Lemke);
    let residual = sol.complementarity_residual();
    if residual > tol.max(super::scaled_tol(inst)) {
        return Err(fail(format!(
            "Lemke solution has min-map residual {residual:e}"
        )));
    }
    Ok((sol, pivots))
}

fn pivot(tab: &mut DMatrix<f64>, r: usize, c: usize) {
    let p = tab[(r, c)];
    tab.row_mut(r).scale_mut(1.0 / p);
    let pivot_row = tab.row(r).clone_owned();
    for i in 0..tab.nrows() {
        if i != r {
            let f = tab[(i, c)];
            if f != 0.0 {
                for (c, &v) in pivot_row.iter().enumerate() {
                    tab[(i, c)] -= f * v;
                }
            }
        }
    }
    tab[(r, c)] = 1.0;
}

fn is_min_ratio(
    tab: &DMatrix<f64>,
    rows: &[usize],
    row: usize,
    col: usize,
    rhs: usize,
    eps: f64,
) -> bool {
    let ratio = |i: usize| tab[(i, rhs)] / tab[(i, col)];
    let best = rows.iter().map(|&i| ratio(i)).fold(f64::INFINITY, f64::min);
    ratio(row) <= best + eps * (1.0 + best.abs())
}

/// Lexicographic minimum of `(rhs_i, B^-1_{i,0..m}) / denom(i)` over `rows`.
fn lex_min(
    tab: &DMatrix<f64>,
    rows: &[usize],
    denom: impl Fn(usize) -> f64,
    rhs: usize,
    m: usize,
    eps: f64,
) -> usize {
    let mut remaining: Vec<usize> = rows.to_vec();
    for col in std::iter::once(rhs).chain(0..m) {
        if remaining.len() == 1 {
            break;
        }
        let key = |i: usize| tab[(i, col)] / denom(i);
        let best = remaining
            .iter()
            .map(|&i| key(i))
            .fold(f64::INFINITY, f64::min);
        let cut = best + eps * (1.0 + best.abs());
        remaining.retain(|&i| key(i) <= cut);
    }
    remaining[0]
}
