//! Reduced row echelon form by Gauss-Jordan elimination with partial pivoting.
//!
//! Demonstration-grade by design: the pivot tolerance is exposed because RREF
//! rank decisions are inherently threshold-sensitive. Pivot entries are written
//! as exact ones, eliminated entries as exact zeros, and a final flush clears
//! anything at rounding level, which also makes the operation exactly
//! idempotent.

use super::{check_finite, check_nonempty};
use crate::{Matrix, Result};

/// Returns the reduced form and the pivot column indices in increasing order.
/// Default `pivot_tol` is `max(m,n) * eps * max|a|`.
pub fn rref(a: &Matrix, pivot_tol: Option<f64>) -> Result<(Matrix, Vec<usize>)> {
    check_nonempty(a, "rref input")?;
    check_finite(a, "rref input")?;
    let (m, n) = a.shape();
    let tol = pivot_tol.unwrap_or_else(|| m.max(n) as f64 * f64::EPSILON * a.max_abs());
    let mut w = a.clone();
    let mut pivots = Vec::new();

    let mut r = 0usize;
    for c in 0..n {
        if r == m {
            break;
        }
        // largest entry at or below the current row wins (first on ties)
        let mut piv = r;
        let mut best = w[(r, c)].abs();
        for i in (r + 1)..m {
            let cand = w[(i, c)].abs();
            if cand > best {
                piv = i;
                best = cand;
            }
        }
        if best <= tol {
            for i in r..m {
                w[(i, c)] = 0.0;
            }
            continue;
        }
        if piv != r {
            for j in 0..n {
                let t = w[(r, j)];
                w[(r, j)] = w[(piv, j)];
                w[(piv, j)] = t;
            }
        }
        let pivot = w[(r, c)];
        for j in c..n {
            w[(r, j)] /= pivot;
        }
        w[(r, c)] = 1.0;
        for i in 0..m {
            if i == r {
                continue;
            }
            let factor = w[(i, c)];
            if factor != 0.0 {
                for j in (c + 1)..n {
                    w[(i, j)] -= factor * w[(r, j)];
                }
            }
            w[(i, c)] = 0.0;
        }
        pivots.push(c);
        r += 1;
    }

    // flush rounding-level residue so a second pass is a no-op
    let flush = tol.max(m.max(n) as f64 * f64::EPSILON * w.max_abs());
    let mut out = w;
    for i in 0..m {
        for j in 0..n {
            if out[(i, j)].abs() <= flush {
                out[(i, j)] = 0.0;
            }
        }
    }
    Ok((out, pivots))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_collapse() {
        let a = Matrix::new(3, 2, vec![1.0, 2.0, 2.0, 4.0, 3.0, 6.0]).unwrap();
        let (r, piv) = rref(&a, None).unwrap();
        assert_eq!(r, Matrix::new(3, 2, vec![1.0, 2.0, 0.0, 0.0, 0.0, 0.0]).unwrap());
        assert_eq!(piv, vec![0]);
    }

    #[test]
    fn permutation_to_identity() {
        let a = Matrix::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let (r, piv) = rref(&a, None).unwrap();
        assert_eq!(r, Matrix::identity(2));
        assert_eq!(piv, vec![0, 1]);
    }

    #[test]
    fn pivot_in_second_column() {
        let a = Matrix::new(2, 2, vec![0.0, 0.0, 0.0, 5.0]).unwrap();
        let (r, piv) = rref(&a, None).unwrap();
        assert_eq!(r, Matrix::new(2, 2, vec![0.0, 1.0, 0.0, 0.0]).unwrap());
        assert_eq!(piv, vec![1]);
    }

    #[test]
    fn zero_matrix_no_pivots() {
        let (r, piv) = rref(&Matrix::zeros(2, 2), None).unwrap();
        assert_eq!(r, Matrix::zeros(2, 2));
        assert!(piv.is_empty());
    }

    #[test]
    fn tolerance_controls_rank_decision() {
        let a = Matrix::new(2, 2, vec![1.0, 1.0, 1.0, 1.0 + 1e-13]).unwrap();
        let (r, piv) = rref(&a, Some(1e-10)).unwrap();
        assert_eq!(piv, vec![0]);
        assert_eq!(r, Matrix::new(2, 2, vec![1.0, 1.0, 0.0, 0.0]).unwrap());
        // the same matrix at a tighter tolerance is full rank
        let (_, piv2) = rref(&a, Some(1e-16)).unwrap();
        assert_eq!(piv2, vec![0, 1]);
    }

    #[test]
    fn idempotent_exactly() {
        let a = Matrix::new(
            3,
            4,
            vec![2.0, 4.0, 1.0, 3.0, -1.0, -2.0, 0.5, 0.0, 4.0, 8.0, 5.0, 9.0],
        )
        .unwrap();
        let (r1, p1) = rref(&a, None).unwrap();
        let (r2, p2) = rref(&r1, None).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(p1, p2);
    }

    #[test]
    fn wide_system_free_columns() {
        let a = Matrix::new(2, 3, vec![1.0, 2.0, 3.0, 2.0, 4.0, 7.0]).unwrap();
        let (r, piv) = rref(&a, None).unwrap();
        assert_eq!(piv, vec![0, 2]);
        assert_eq!(r, Matrix::new(2, 3, vec![1.0, 2.0, 0.0, 0.0, 0.0, 1.0]).unwrap());
    }
}
