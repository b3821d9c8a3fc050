use nalgebra::{DMatrix, DVector};

use super::{scaled_tol, LcpInstance, LcpSolution, LcpSolverKind};
use crate::error::{Error, Result};

const MAX_DIM: usize = 20;

/// Enumerates all `2^m` supports and returns the feasible complementary one.
/// Test oracle; limited to `m <= 20`.
pub fn brute_force_lcp(inst: &LcpInstance) -> Result<LcpSolution> {
    let m = inst.dim();
    if m == 0 {
        return Ok(LcpSolution::empty());
    }
    if m > MAX_DIM {
        return Err(Error::InvalidParameter(format!(
            "brute force LCP limited to m <= {MAX_DIM}, got {m}"
        )));
    }
    let tol = scaled_tol(inst);
    let mut best: Option<(f64, DVector<f64>)> = None;
    for mask in 0u32..(1u32 << m) {
        let support: Vec<usize> = (0..m).filter(|&k| mask & (1 << k) != 0).collect();
        let mut x = DVector::zeros(m);
        if !support.is_empty() {
            let sub: DMatrix<f64> = inst
                .matrix
                .select_rows(support.iter())
                .select_columns(support.iter());
            let rhs = -DVector::from_iterator(support.len(), support.iter().map(|&k| inst.q[k]));
            let Some(xs) = sub.lu().solve(&rhs) else {
                continue;
            };
            for (&k, &v) in support.iter().zip(xs.iter()) {
                x[k] = v;
            }
        }
        let y = inst.response(&x);
        let violation = (0..m)
            .map(|k| {
                if mask & (1 << k) != 0 {
                    (-x[k]).max(0.0)
                } else {
                    (-y[k]).max(0.0)
                }
            })
            .fold(0.0_f64, f64::max);
        if violation <= tol && best.as_ref().is_none_or(|(v, _)| violation < *v) {
            best = Some((violation, x));
        }
    }
    let (_, x) = best.ok_or_else(|| Error::Lcp {
        reason: "no complementary support found".into(),
        dump: inst.dump(),
    })?;
    let x = x.map(|v| v.max(0.0));
    let y = inst.response(&x);
    Ok(LcpSolution {
        x,
        y,
        solver_used: LcpSolverKind::BruteForce,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_hand_solve() {
        let inst = LcpInstance::new(
            DMatrix::from_element(1, 1, 4.0),
            DVector::from_element(1, -8.0),
        )
        .unwrap();
        assert_eq!(brute_force_lcp(&inst).unwrap().x[0], 2.0);
    }

    #[test]
    fn empty_and_oversized() {
        assert_eq!(
            brute_force_lcp(&LcpInstance::empty()).unwrap().solver_used,
            LcpSolverKind::Empty
        );
        let big = LcpInstance::new(DMatrix::identity(21, 21), DVector::zeros(21)).unwrap();
        assert!(brute_force_lcp(&big).is_err());
    }

    #[test]
    fn two_by_two_enumeration() {
        // supports {}, {0}, {1}, {0,1}: only {0} gives x = (1, 0), y = (0, 3)
        let inst = LcpInstance::new(
            DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]),
            DVector::from_vec(vec![-2.0, 3.0]),
        )
        .unwrap();
        let sol = brute_force_lcp(&inst).unwrap();
        assert_eq!(sol.x, DVector::from_vec(vec![1.0, 0.0]));
        assert_eq!(sol.y, DVector::from_vec(vec![0.0, 3.0]));
    }
}
