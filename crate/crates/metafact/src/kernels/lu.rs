//! LU with partial (row) pivoting. Zero pivots are tolerated: a singular
//! column simply leaves zeros below the diagonal, as in textbook elimination.

use super::{check_finite, check_nonempty};
use crate::{Error, Matrix, Result};

pub struct LuFactors {
    /// Unit lower triangular (exact ones on the diagonal, exact zeros above).
    pub l: Matrix,
    /// Upper triangular with exact zeros below the diagonal.
    pub u: Matrix,
    /// Row order: row i of `l*u` is row `perm[i]` of the input.
    pub perm: Vec<usize>,
}

impl LuFactors {
    /// The input rows in pivot order, i.e. `P*A`.
    pub fn permuted(&self, a: &Matrix) -> Matrix {
        a.select_rows(&self.perm)
    }
}

pub fn lu(a: &Matrix) -> Result<LuFactors> {
    check_nonempty(a, "lu input")?;
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    check_finite(a, "lu input")?;
    let n = a.rows();
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();

    for k in 0..n {
        let mut piv = k;
        let mut best = w[(k, k)].abs();
        for i in (k + 1)..n {
            let cand = w[(i, k)].abs();
            if cand > best {
                piv = i;
                best = cand;
            }
        }
        if piv != k {
            for j in 0..n {
                let t = w[(k, j)];
                w[(k, j)] = w[(piv, j)];
                w[(piv, j)] = t;
            }
            perm.swap(k, piv);
        }
        let pivot = w[(k, k)];
        if pivot == 0.0 {
            // whole subcolumn is zero; nothing to eliminate
            continue;
        }
        for i in (k + 1)..n {
            let factor = w[(i, k)] / pivot;
            w[(i, k)] = factor;
            for j in (k + 1)..n {
                w[(i, j)] -= factor * w[(k, j)];
            }
        }
    }

    let mut l = Matrix::identity(n);
    let mut u = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            l[(i, j)] = w[(i, j)];
        }
        for j in i..n {
            u[(i, j)] = w[(i, j)];
        }
    }
    Ok(LuFactors { l, u, perm })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_pivots() {
        let a = Matrix::new(2, 2, vec![2.0, 1.0, 4.0, 3.0]).unwrap();
        let f = lu(&a).unwrap();
        assert_eq!(f.perm, vec![1, 0]);
        assert_eq!(f.l, Matrix::new(2, 2, vec![1.0, 0.0, 0.5, 1.0]).unwrap());
        assert_eq!(f.u, Matrix::new(2, 2, vec![4.0, 3.0, 0.0, -0.5]).unwrap());
        assert_eq!(f.l.dot(&f.u), f.permuted(&a));
    }

    #[test]
    fn identity() {
        let f = lu(&Matrix::identity(3)).unwrap();
        assert_eq!(f.l, Matrix::identity(3));
        assert_eq!(f.u, Matrix::identity(3));
        assert_eq!(f.perm, vec![0, 1, 2]);
    }

    #[test]
    fn zero_pivot_forces_swap() {
        let a = Matrix::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let f = lu(&a).unwrap();
        assert_eq!(f.perm, vec![1, 0]);
        assert_eq!(f.l, Matrix::identity(2));
        assert_eq!(f.u, Matrix::identity(2));
    }

    #[test]
    fn singular_input_still_factors() {
        let a = Matrix::new(2, 2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        let f = lu(&a).unwrap();
        assert_eq!(f.u[(1, 1)], 0.0);
        let res = f.permuted(&a).sub(&f.l.dot(&f.u));
        assert!(res.max_abs() <= 64.0 * 4.0 * f64::EPSILON * a.max_abs());
    }

    #[test]
    fn rectangular_rejected() {
        assert!(matches!(
            lu(&Matrix::zeros(2, 3)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn structural_shape_exact() {
        let a = Matrix::new(3, 3, vec![0.1, 2.0, -1.0, 4.0, 0.5, 3.0, 1.0, 1.0, 1.0]).unwrap();
        let f = lu(&a).unwrap();
        for i in 0..3 {
            assert_eq!(f.l[(i, i)], 1.0);
            for j in (i + 1)..3 {
                assert_eq!(f.l[(i, j)], 0.0);
                assert_eq!(f.u[(j, i)], 0.0);
            }
        }
        let res = f.permuted(&a).sub(&f.l.dot(&f.u));
        assert!(res.max_abs() <= 64.0 * 9.0 * f64::EPSILON * a.max_abs());
    }
}
