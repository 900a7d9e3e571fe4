//! Classical factorizations recovered through the mixing-matrix machinery,
//! and the UTV family obtained by factorizing the mixing matrix itself.
//!
//! The recipe is always the same: pick bases for the column and row spaces,
//! solve the projector equation, and read off `g = yᵀ·a·x`. Singular bases
//! make `g` diagonal, pivoted-QR bases make it the identity, and factoring
//! a dense `g` (by SVD, pivoted QR, or permuted LU) turns the triple into a
//! UTV decomposition whose middle factor carries the triangular structure.

use crate::core::{meta_factorize, BasisPair, MetaFactorization, SketchPair};
use crate::kernels::{lu, numerical_rank, qr, svd, UpLo};
use crate::matrix::Matrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UtvVariant {
    RowSvd,
    TwoSidedSvd,
    TwoSidedQr,
    TwoSidedLu,
}

impl UtvVariant {
    pub fn name(self) -> &'static str {
        match self {
            UtvVariant::RowSvd => "row-svd",
            UtvVariant::TwoSidedSvd => "two-sided-svd",
            UtvVariant::TwoSidedQr => "two-sided-qr",
            UtvVariant::TwoSidedLu => "two-sided-lu",
        }
    }

    /// Whether `u` is guaranteed orthonormal columns by construction.
    pub fn u_orthonormal(self) -> bool {
        // The two-sided SVD variant folds Ū into Q_c(:,1:k); the product
        // still has orthonormal columns, but u·uᵀ is a genuinely oblique
        // object and the guarantee is not part of this variant's contract.
        !matches!(self, UtvVariant::TwoSidedSvd)
    }

    /// Whether `v` is guaranteed orthonormal columns by construction.
    pub fn v_orthonormal(self) -> bool {
        // The LU variant closes with the upper-triangular factor of the
        // mixing matrix, which destroys orthonormality of v.
        !matches!(self, UtvVariant::TwoSidedLu)
    }
}

/// A triple `u·t·vᵀ ≈ a` with structurally triangular `t`.
///
/// Zeros implied by `structure` are exact, never rounded residue.
#[derive(Debug, Clone)]
pub struct UtvFactors {
    pub u: Matrix,
    pub t: Matrix,
    pub v: Matrix,
    pub variant: UtvVariant,
    pub structure: UpLo,
}

impl UtvFactors {
    pub fn reconstruct(&self) -> Matrix {
        self.u.dot(&self.t).dot(&self.v.t())
    }
}

fn check_rank_budget(a: &Matrix, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidDimension("rank k must be at least 1".into()));
    }
    let available = numerical_rank(a, None)?;
    if k > available {
        return Err(Error::RankTooLarge {
            requested: k,
            available,
        });
    }
    Ok(())
}

/// `[vbar 0; 0 I]` of order n, vbar k×k.
fn embed_blockdiag(vbar: &Matrix, n: usize) -> Matrix {
    let k = vbar.rows();
    let mut out = Matrix::zeros(n, n);
    for i in 0..k {
        for j in 0..k {
            out[(i, j)] = vbar[(i, j)];
        }
    }
    for i in k..n {
        out[(i, i)] = 1.0;
    }
    out
}

/// Rebuild the reduced singular value decomposition through the pipeline:
/// singular-vector bases force the mixing matrix to be diag(σ₁,…,σ_k).
pub fn svd_via_meta(a: &Matrix, k: usize) -> Result<MetaFactorization> {
    check_rank_budget(a, k)?;
    let sv = svd(a)?;
    let f = sv.u.slice_cols(0, k);
    let h = sv.v.slice_cols(0, k);
    let basis = BasisPair::new(f.clone(), h.clone());
    let sketch = SketchPair::new(f, h);
    meta_factorize(a, basis, &sketch)
}

/// Factorize with pivoted-QR bases `f = q(:,1:k)`, `hᵀ = r(1:k,:)·πᵀ` and
/// report how far the mixing matrix lands from its theoretical value `I_k`.
pub fn cpqr_mixing(a: &Matrix, k: usize) -> Result<(MetaFactorization, f64)> {
    check_rank_budget(a, k)?;
    let fq = qr(a, true, false)?;
    let f = fq.q.slice_cols(0, k);
    let ht = fq.r.slice_rows(0, k).scatter_cols(&fq.perm);
    let h = ht.t();
    let basis = BasisPair::new(f.clone(), h.clone());
    let sketch = SketchPair::new(f, h);
    let fac = meta_factorize(a, basis, &sketch)?;
    let deviation = fac.g.sub(&Matrix::identity(k)).norm_fro();
    Ok((fac, deviation))
}

/// UTV from the row-space projector alone: with `q_r` the full pivoted QR
/// factor of `aᵀ`, the mixing matrix `g = a·q_r(:,1:k)` is factored by SVD
/// and the trailing columns of `q_r` are carried along:
/// `u = ū`, `t = [s̄ | ūᵀ·a·q_r(:,k+1:n)]`, `v = q_r·[v̄ 0; 0 I]`.
/// Both `u` and `v` end up with orthonormal columns and `t` upper trapezoidal.
pub fn utv_row_svd(a: &Matrix, k: usize) -> Result<UtvFactors> {
    check_rank_budget(a, k)?;
    let n = a.cols();
    let qr_full = qr(&a.t(), true, true)?.q; // n×n
    let g = a.dot(&qr_full.slice_cols(0, k)); // m×k
    let sg = svd(&g)?;

    let mut t = Matrix::diag(&sg.s);
    if k < n {
        let tail = sg.u.t().dot(a).dot(&qr_full.slice_cols(k, n));
        t = t.hstack(&tail);
    }
    let v = qr_full.dot(&embed_blockdiag(&sg.v, n));
    Ok(UtvFactors {
        u: sg.u,
        t,
        v,
        variant: UtvVariant::RowSvd,
        structure: UpLo::Upper,
    })
}

fn two_sided_bases(a: &Matrix, k: usize, full_row: bool) -> Result<(Matrix, Matrix, Matrix)> {
    let qc1 = qr(a, true, false)?.q.slice_cols(0, k);
    let qr_factor = qr(&a.t(), true, full_row)?.q;
    let g = qc1.t().dot(a).dot(&qr_factor.slice_cols(0, k));
    Ok((qc1, qr_factor, g))
}

/// Two-sided UTV with the mixing matrix `g = q_c(:,1:k)ᵀ·a·q_r(:,1:k)`
/// factored by SVD: `u = q_c(:,1:k)·ū`, `t = [s̄ | ūᵀq_c(:,1:k)ᵀ·a·q_r(:,k+1:n)]`,
/// `v = q_r·[v̄ 0; 0 I]`. Here `u·uᵀ = q_c(:,1:k)·q_c(:,1:k)ᵀ`, not an
/// identity: the price of re-coordinating both sides.
pub fn utv_two_sided_svd(a: &Matrix, k: usize) -> Result<UtvFactors> {
    check_rank_budget(a, k)?;
    let n = a.cols();
    let (qc1, qr_full, g) = two_sided_bases(a, k, true)?;
    let sg = svd(&g)?;

    let mut t = Matrix::diag(&sg.s);
    if k < n {
        let tail = sg
            .u
            .t()
            .dot(&qc1.t().dot(a))
            .dot(&qr_full.slice_cols(k, n));
        t = t.hstack(&tail);
    }
    Ok(UtvFactors {
        u: qc1.dot(&sg.u),
        t,
        v: qr_full.dot(&embed_blockdiag(&sg.v, n)),
        variant: UtvVariant::TwoSidedSvd,
        structure: UpLo::Upper,
    })
}

/// Two-sided UTV closing with a pivoted QR of the mixing matrix:
/// `g·π̄ = q̄·r̄` gives `u = q_c(:,1:k)·q̄`, `t = r̄`, `v = q_r(:,1:k)·π̄`.
/// Both `u` and `v` keep orthonormal columns; `t` is k×k upper triangular.
pub fn utv_two_sided_qr(a: &Matrix, k: usize) -> Result<UtvFactors> {
    check_rank_budget(a, k)?;
    let (qc1, qr_thin, g) = two_sided_bases(a, k, false)?;
    let qr1 = qr_thin.slice_cols(0, k);
    let gq = qr(&g, true, false)?;
    Ok(UtvFactors {
        u: qc1.dot(&gq.q),
        t: gq.r,
        v: qr1.select_cols(&gq.perm),
        variant: UtvVariant::TwoSidedQr,
        structure: UpLo::Upper,
    })
}

/// Two-sided UTV closing with a permuted LU of the mixing matrix:
/// `π̃·g = l̃·ũ` gives `u = q_c(:,1:k)·π̃ᵀ`, `t = l̃`, `v = q_r(:,1:k)·ũᵀ`.
/// `t` is unit lower triangular and only `u` keeps orthonormal columns —
/// the triangular `ũ` is folded into `v`. A singular mixing matrix has no
/// usable pivots and is rejected.
pub fn utv_two_sided_lu(a: &Matrix, k: usize) -> Result<UtvFactors> {
    check_rank_budget(a, k)?;
    let (qc1, qr_thin, g) = two_sided_bases(a, k, false)?;
    let qr1 = qr_thin.slice_cols(0, k);
    if numerical_rank(&g, None)? < k {
        return Err(Error::RankDeficientAnchor(
            "mixing matrix q_c'a q_r is singular; the basis subspaces are misaligned".into(),
        ));
    }
    let gl = lu(&g)?;
    Ok(UtvFactors {
        u: qc1.select_cols(&gl.perm),
        t: gl.l,
        v: qr1.dot(&gl.u.t()),
        variant: UtvVariant::TwoSidedLu,
        structure: UpLo::Lower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: usize, cols: usize, v: &[f64]) -> Matrix {
        Matrix::new(rows, cols, v.to_vec()).unwrap()
    }

    #[test]
    fn svd_route_recovers_diagonal_mixing() {
        let a = Matrix::diag(&[3.0, 2.0, 1.0]);
        let fac = svd_via_meta(&a, 2).unwrap();
        assert!(fac.g.sub(&Matrix::diag(&[3.0, 2.0])).norm_fro() < 1e-12);
        assert_eq!(fac.k, 2);
    }

    #[test]
    fn svd_route_rejects_oversized_rank() {
        let a = Matrix::diag(&[3.0, 2.0, 1.0]);
        let err = svd_via_meta(&a, 4).unwrap_err();
        assert_eq!(err.kind(), "RankTooLarge");
        let rank1 = mat(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(svd_via_meta(&rank1, 2).unwrap_err().kind(), "RankTooLarge");
    }

    #[test]
    fn cpqr_identity_input_has_zero_deviation() {
        let (fac, dev) = cpqr_mixing(&Matrix::identity(3), 3).unwrap();
        assert_eq!(dev, 0.0);
        assert_eq!(fac.report.residual_rel, 0.0);
    }

    #[test]
    fn row_svd_on_diagonal_is_the_diagonal() {
        let a = Matrix::diag(&[2.0, 1.0]);
        let f = utv_row_svd(&a, 2).unwrap();
        assert!(f.t.sub(&a).norm_fro() < 1e-14);
        assert!(f.u.sub(&Matrix::identity(2)).norm_fro() < 1e-14);
        assert!(f.v.sub(&Matrix::identity(2)).norm_fro() < 1e-14);
    }

    #[test]
    fn identity_input_gives_identity_t_in_all_variants() {
        let a = Matrix::identity(4);
        for f in [
            utv_row_svd(&a, 4).unwrap(),
            utv_two_sided_svd(&a, 4).unwrap(),
            utv_two_sided_qr(&a, 4).unwrap(),
            utv_two_sided_lu(&a, 4).unwrap(),
        ] {
            assert!(
                f.t.sub(&Matrix::identity(4)).norm_fro() < 1e-12,
                "variant {}",
                f.variant.name()
            );
            assert!(
                f.reconstruct().sub(&a).norm_fro() < 1e-12,
                "variant {}",
                f.variant.name()
            );
        }
    }

    #[test]
    fn lu_variant_rejects_misaligned_subspaces() {
        // Full-rank input whose leading pivoted-QR directions on the two
        // sides are orthogonal to each other, collapsing the 1×1 mixing
        // matrix to zero.
        let a = mat(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let err = utv_two_sided_lu(&a, 1).unwrap_err();
        assert_eq!(err.kind(), "RankDeficientAnchor");
    }

    #[test]
    fn structural_zeros_are_exact() {
        let a = mat(
            3,
            3,
            &[4.0, 1.0, -2.0, 1.0, 3.0, 0.5, -2.0, 0.5, 5.0],
        );
        let up = utv_two_sided_qr(&a, 3).unwrap();
        for i in 0..3 {
            for j in 0..i {
                assert_eq!(up.t[(i, j)], 0.0);
            }
        }
        let lo = utv_two_sided_lu(&a, 3).unwrap();
        for i in 0..3 {
            for j in (i + 1)..3 {
                assert_eq!(lo.t[(i, j)], 0.0);
            }
        }
        let row = utv_row_svd(&a, 2).unwrap();
        assert_eq!(row.t.shape(), (2, 3));
        assert_eq!(row.t[(1, 0)], 0.0);
        assert_eq!(row.t[(0, 1)], 0.0, "leading block is diagonal");
    }
}
