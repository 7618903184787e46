//! Dense primal simplex for `max c·v  s.t.  A v <= b, v >= 0` with `b >= 0`.
//!
//! Only used for the dual-norm computation of polyhedral norms, where the
//! origin is always feasible so no phase one is needed. Bland's rule keeps
//! the pivoting finite.

use alloc::vec;
use alloc::vec::Vec;

const EPS: f64 = 1e-12;

pub(crate) struct LpSolution {
    pub point: Vec<f64>,
}

/// Returns `None` when the problem is unbounded or the pivot limit is hit.
pub(crate) fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<LpSolution> {
    let n = c.len();
    let m = a.len();
    debug_assert_eq!(b.len(), m);
    debug_assert!(b.iter().all(|&v| v >= 0.0));
    let width = n + m + 1;
    // rows 0..m constraints, row m objective (stores -c)
    let mut t = vec![0.0; (m + 1) * width];
    for i in 0..m {
        debug_assert_eq!(a[i].len(), n);
        t[i * width..i * width + n].copy_from_slice(&a[i]);
        t[i * width + n + i] = 1.0;
        t[i * width + n + m] = b[i];
    }
    for j in 0..n {
        t[m * width + j] = -c[j];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    let max_pivots = 50 * (n + m) + 100;
    for _ in 0..max_pivots {
        let Some(enter) = (0..n + m).find(|&j| t[m * width + j] < -EPS) else {
            let mut point = vec![0.0; n];
            for (i, &bv) in basis.iter().enumerate() {
                if bv < n {
                    point[bv] = t[i * width + n + m];
                }
            }
            return Some(LpSolution { point });
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let coef = t[i * width + enter];
            if coef > EPS {
                let ratio = t[i * width + n + m] / coef;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - EPS || (ratio <= lr + EPS && basis[i] < basis[li]) {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        let (row, _) = leave?;
        let piv = t[row * width + enter];
        for j in 0..width {
            t[row * width + j] /= piv;
        }
        for i in 0..=m {
            if i == row {
                continue;
            }
            let f = t[i * width + enter];
            if f != 0.0 {
                for j in 0..width {
                    t[i * width + j] -= f * t[row * width + j];
                }
            }
        }
        basis[row] = enter;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_textbook_problem() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), value 36
        let a = vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]];
        let s = maximize(&[3.0, 5.0], &a, &[4.0, 12.0, 18.0]).unwrap();
        assert!((s.point[0] - 2.0).abs() < 1e-12);
        assert!((s.point[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded_is_none() {
        let a = vec![vec![1.0, -1.0]];
        assert!(maximize(&[0.0, 1.0], &a, &[1.0]).is_none());
    }
}
