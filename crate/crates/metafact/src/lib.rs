//! Dense linear algebra built around factorizations of the form A = F·G·Hᵀ.
//!
//! The outer factors F and H are chosen first (orthonormal bases, random
//! sketches, column/row subsets); the inner factor is recovered by solving the
//! projector equation YᵀF = HᵀX = I_k and forming the mixing matrix G = YᵀAX.
//! On top of that machinery the crate provides dense kernels (QR, SVD, LU,
//! RREF, triangular solves), classical reconstructions (SVD, pivoted QR, UTV
//! variants), randomized low-rank schemes (generalized Nystrom, CUR, Wedderburn
//! deflation), explicit pseudoinverse formulas, periodic projector equations,
//! and Matrix Market / CSV I/O with synthetic test-matrix generation.
//!
//! Everything is plain `f64`, row-major, and deterministic: fixed seeds give
//! bit-identical results on the same platform.

pub mod core;
mod error;
pub mod factorizations;
pub mod io;
pub mod kernels;
pub mod matrix;
pub mod periodic;
pub mod pinv;
pub mod randomized;

pub use error::{Error, Result};
pub use matrix::Matrix;
