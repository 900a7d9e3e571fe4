//! Triangular solves on either side. Only the declared triangle is read, so
//! factors carrying reflector storage in the other half are safe to pass.

use super::{check_finite, check_nonempty};
use crate::{Error, Matrix, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Solve `r * x = b`.
    Left,
    /// Solve `x * r = b`.
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpLo {
    Upper,
    Lower,
}

pub fn solve_triangular(r: &Matrix, b: &Matrix, side: Side, uplo: UpLo) -> Result<Matrix> {
    check_nonempty(r, "triangular factor")?;
    check_nonempty(b, "right-hand side")?;
    if !r.is_square() {
        return Err(Error::NotSquare { rows: r.rows(), cols: r.cols() });
    }
    check_finite(r, "triangular factor")?;
    check_finite(b, "right-hand side")?;
    let n = r.rows();
    let ok = match side {
        Side::Left => b.rows() == n,
        Side::Right => b.cols() == n,
    };
    if !ok {
        return Err(Error::InvalidDimension(format!(
            "factor is {}x{} but rhs is {}x{}",
            n,
            n,
            b.rows(),
            b.cols()
        )));
    }
    let scale = r.max_abs();
    for i in 0..n {
        if r[(i, i)].abs() <= f64::EPSILON * scale {
            return Err(Error::SingularTriangular { index: i });
        }
    }

    let mut x = b.clone();
    match (side, uplo) {
        (Side::Left, UpLo::Upper) => {
            // back substitution, one rhs column at a time
            for c in 0..x.cols() {
                for i in (0..n).rev() {
                    let mut acc = x[(i, c)];
                    for t in (i + 1)..n {
                        acc -= r[(i, t)] * x[(t, c)];
                    }
                    x[(i, c)] = acc / r[(i, i)];
                }
            }
        }
        (Side::Left, UpLo::Lower) => {
            for c in 0..x.cols() {
                for i in 0..n {
                    let mut acc = x[(i, c)];
                    for t in 0..i {
                        acc -= r[(i, t)] * x[(t, c)];
                    }
                    x[(i, c)] = acc / r[(i, i)];
                }
            }
        }
        (Side::Right, UpLo::Upper) => {
            for rr in 0..x.rows() {
                for j in 0..n {
                    let mut acc = x[(rr, j)];
                    for t in 0..j {
                        acc -= x[(rr, t)] * r[(t, j)];
                    }
                    x[(rr, j)] = acc / r[(j, j)];
                }
            }
        }
        (Side::Right, UpLo::Lower) => {
            for rr in 0..x.rows() {
                for j in (0..n).rev() {
                    let mut acc = x[(rr, j)];
                    for t in (j + 1)..n {
                        acc -= x[(rr, t)] * r[(t, j)];
                    }
                    x[(rr, j)] = acc / r[(j, j)];
                }
            }
        }
    }
    Ok(x)
}
