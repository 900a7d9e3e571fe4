//! Self-contained dense kernels: Householder QR (optionally pivoted, optionally
//! full), Golub-Kahan SVD, partially pivoted LU, triangular solves, SVD-based
//! pseudoinverse, and a demonstration-grade RREF.
//!
//! Conventions shared by every kernel: structural zeros are written as exact
//! `0.0`, the diagonal of R from `qr` is non-negative, each left singular
//! vector from `svd` has a non-negative first nonzero entry, and nothing here
//! draws random numbers, so identical input gives bit-identical output.

mod lu;
mod pinv;
mod qr;
mod rref;
mod svd;
mod triangular;

pub use lu::{lu, LuFactors};
pub use pinv::{numerical_rank, pinv, rank_from_singular_values};
pub use qr::{qr, QrFactors};
pub use rref::rref;
pub use svd::{svd, SvdFactors};
pub use triangular::{solve_triangular, Side, UpLo};

use crate::{Error, Matrix, Result};

pub(crate) fn check_nonempty(a: &Matrix, what: &str) -> Result<()> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::InvalidDimension(format!(
            "{} must be non-empty, got {}x{}",
            what,
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

pub(crate) fn check_finite(a: &Matrix, what: &str) -> Result<()> {
    if !a.is_finite() {
        return Err(Error::NonFiniteInput(format!("{} contains NaN or infinity", what)));
    }
    Ok(())
}

/// Householder reflector for `x`: returns `(v, beta, mu)` with `v[0] = 1` and
/// `(I - beta v vT) x = mu e1`, `mu = ||x||_2 >= 0`.
pub(crate) fn house(x: &[f64]) -> (Vec<f64>, f64, f64) {
    debug_assert!(!x.is_empty());
    let sigma: f64 = x[1..].iter().map(|t| t * t).sum();
    let mut v = x.to_vec();
    v[0] = 1.0;
    if sigma == 0.0 {
        // x is already a multiple of e1; reflect only to fix the sign
        if x[0] >= 0.0 {
            (v, 0.0, x[0])
        } else {
            (v, 2.0, -x[0])
        }
    } else {
        let mu = (x[0] * x[0] + sigma).sqrt();
        // choose v[0] to avoid cancellation; mu stays positive either way
        let v0 = if x[0] <= 0.0 {
            x[0] - mu
        } else {
            -sigma / (x[0] + mu)
        };
        let beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
        for t in v[1..].iter_mut() {
            *t /= v0;
        }
        (v, beta, mu)
    }
}
