//! Explicit pseudoinverse formulas built from full-rank factorizations.
//!
//! The production pseudoinverse lives in [`crate::kernels::pinv`]; this
//! module exposes the closed forms that explain it. They run the RREF
//! route, so they are demonstration-grade on purpose — structure first,
//! conditioning second.

use crate::core::{defect_via_gram, BasisPair, FactorReport, MetaFactorization};
use crate::kernels::{lu, numerical_rank, pinv, rref, solve_triangular, Side, UpLo};
use crate::matrix::Matrix;
use crate::{Error, Result};
use std::time::Instant;

/// Column/row-echelon factorization `a = c·r`: `c` holds the first `k`
/// independent columns of `a` verbatim, `r` the `k` nonzero rows of its
/// reduced row echelon form. `r` carries an exact identity submatrix at
/// the pivot columns.
#[derive(Debug, Clone)]
pub struct CrFactors {
    pub c: Matrix,
    pub r: Matrix,
    pub k: usize,
}

impl CrFactors {
    pub fn reconstruct(&self) -> Matrix {
        self.c.dot(&self.r)
    }
}

pub fn cr_decompose(a: &Matrix, pivot_tol: Option<f64>) -> Result<CrFactors> {
    let (reduced, pivots) = rref(a, pivot_tol)?;
    if pivots.is_empty() {
        return Err(Error::ZeroMatrix);
    }
    let k = pivots.len();
    Ok(CrFactors {
        c: a.select_cols(&pivots),
        r: reduced.slice_rows(0, k),
        k,
    })
}

/// Inverse of a small square matrix through LU with partial pivoting:
/// `m⁻¹ = u⁻¹·l⁻¹·p`. A diagonal entry of `u` at rounding level relative
/// to `m` means the matrix is numerically singular.
fn invert_via_lu(m: &Matrix) -> Result<Matrix> {
    let k = m.rows();
    let f = lu(m)?;
    let floor = k as f64 * f64::EPSILON * m.max_abs();
    for i in 0..k {
        if f.u[(i, i)].abs() <= floor {
            return Err(Error::SingularMiddle(format!(
                "pivot {} of the middle matrix is {:.3e}, at rounding level for scale {:.3e}",
                i,
                f.u[(i, i)],
                m.max_abs()
            )));
        }
    }
    let li = solve_triangular(&f.l, &Matrix::identity(k), Side::Left, UpLo::Lower)?;
    let ui_li = solve_triangular(&f.u, &li, Side::Left, UpLo::Upper)?;
    Ok(ui_li.scatter_cols(&f.perm))
}

/// Pseudoinverse through the CR route: `a⁺ = rᵀ·(cᵀ·a·rᵀ)⁻¹·cᵀ`, with the
/// k×k middle matrix inverted by LU.
///
/// `pivot_tol` is handed to the rank-revealing elimination; pass a value
/// scaled to the data when noise-level pivots would otherwise inflate the
/// detected rank and make the middle matrix singular.
pub fn pinv_via_cr(a: &Matrix, pivot_tol: Option<f64>) -> Result<Matrix> {
    let cr = cr_decompose(a, pivot_tol)?;
    let middle = cr.c.t().dot(a).dot(&cr.r.t());
    let inv = invert_via_lu(&middle)?;
    Ok(cr.r.t().dot(&inv).dot(&cr.c.t()))
}

/// MacDuffee's formula: any full-rank factorization `a = b·d` gives
/// `a⁺ = dᵀ·(bᵀ·a·dᵀ)⁻¹·bᵀ`. The product `a` is recomputed from the
/// factors, so there is no separate input to drift out of sync.
pub fn pinv_macduffee(b: &Matrix, d: &Matrix) -> Result<Matrix> {
    let k = b.cols();
    if d.rows() != k {
        return Err(Error::DimensionMismatch(format!(
            "inner dimensions {} and {} do not meet",
            k,
            d.rows()
        )));
    }
    if numerical_rank(b, None)? < k || numerical_rank(d, None)? < k {
        return Err(Error::NotFullRank(format!(
            "factors must both have full rank {}",
            k
        )));
    }
    let a = b.dot(d);
    let middle = b.t().dot(&a).dot(&d.t());
    let inv = invert_via_lu(&middle)?;
    Ok(d.t().dot(&inv).dot(&b.t()))
}

/// The pseudoinverse packaged as a factorization of `a` itself: with
/// `f = a` and `hᵀ = a`, the mixing matrix is `g = a⁺` and the
/// reconstruction equation reads `a = a·a⁺·a`. The report carries the
/// verification residual and the idempotence defects of the two
/// orthogonal projectors `a·a⁺` and `a⁺·a`.
pub fn pinv_as_meta(a: &Matrix) -> Result<MetaFactorization> {
    let start = Instant::now();
    let g = pinv(a, None)?;
    let f = a.clone();
    let h = a.t();

    let recon = a.dot(&g).dot(a);
    let diff = recon.sub(a).norm_fro();
    let na = a.norm_fro();
    let residual_rel = if diff == 0.0 { 0.0 } else { diff / na };

    let k = numerical_rank(a, None)?;
    // y' = x = a⁺ solves the projector equation for this basis; the
    // defects are the usual ‖p² − p‖/‖p‖ computed through Gram products.
    let y = g.t(); // m×n
    let x = g.clone(); // n×m
    let dy = y.t().dot(&f).sub(&Matrix::identity(a.cols()));
    let dx = h.t().dot(&x).sub(&Matrix::identity(a.rows()));
    let report = FactorReport {
        residual_rel,
        idem_defect_p: defect_via_gram(&f, &y, &dy),
        idem_defect_r: defect_via_gram(&x, &h, &dx),
        detected_rank: k,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    };
    Ok(MetaFactorization {
        basis: BasisPair::new(f, h),
        g,
        k,
        report,
    })
}
