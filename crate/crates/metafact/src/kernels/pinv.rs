//! Moore-Penrose pseudoinverse and numerical rank through the SVD.

use super::svd::svd;
use super::{check_finite, check_nonempty};
use crate::{Matrix, Result};

/// Default relative cutoff: `max(m,n) * eps`, scaled by the largest singular
/// value at the use site.
pub(crate) fn default_rtol(rows: usize, cols: usize) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON
}

/// Count of singular values above `rtol * s_max`.
pub fn rank_from_singular_values(s: &[f64], rtol: f64) -> usize {
    let smax = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| x > rtol * smax).count()
}

/// Numerical rank of `a` at relative tolerance `rtol` (default
/// `max(m,n) * eps`).
pub fn numerical_rank(a: &Matrix, rtol: Option<f64>) -> Result<usize> {
    let f = svd(a)?;
    let rtol = rtol.unwrap_or_else(|| default_rtol(a.rows(), a.cols()));
    Ok(rank_from_singular_values(&f.s, rtol))
}

/// Pseudoinverse `v * diag(s+) * u^T`, inverting only singular values above
/// `rtol * s_max`. The zero matrix maps to the zero matrix.
pub fn pinv(a: &Matrix, rtol: Option<f64>) -> Result<Matrix> {
    check_nonempty(a, "pinv input")?;
    check_finite(a, "pinv input")?;
    let f = svd(a)?;
    let rtol = rtol.unwrap_or_else(|| default_rtol(a.rows(), a.cols()));
    let smax = f.s.first().copied().unwrap_or(0.0);
    let cutoff = rtol * smax;
    let mut vs = f.v.clone();
    for (j, &sj) in f.s.iter().enumerate() {
        let inv = if sj > cutoff { 1.0 / sj } else { 0.0 };
        for i in 0..vs.rows() {
            vs[(i, j)] *= inv;
        }
    }
    Ok(vs.dot(&f.u.t()))
}
