//! The meta-factorization engine.
//!
//! Everything here revolves around one identity: given bases `f` (m×k) and
//! `h` (n×k), find `y`, `x` with `yᵀf = hᵀx = I_k`. Then `p = f·yᵀ` and
//! `r = x·hᵀ` are idempotent, `g = yᵀ·a·x` is the mixing matrix, and
//! `f·g·hᵀ` reproduces `a` whenever the bases span its column and row
//! spaces. Anchor matrices `b`, `d` parameterize the solution family:
//! `yᵀ = (bᵀf)⁺bᵀ` and `x = d(hᵀd)⁺`.

use crate::kernels::{numerical_rank, pinv, qr, solve_triangular, Side, UpLo};
use crate::matrix::Matrix;
use crate::{Error, Result};
use std::time::Instant;

/// Column-space basis `f` (m×k) and row-space basis `h` (n×k).
///
/// The plain constructor accepts any widths (sketch-based factorizations
/// legitimately pair an m×k `f` with an n×(k+p) `h`); `validated` insists
/// each factor has full column rank.
#[derive(Debug, Clone)]
pub struct BasisPair {
    pub f: Matrix,
    pub h: Matrix,
}

impl BasisPair {
    pub fn new(f: Matrix, h: Matrix) -> Self {
        BasisPair { f, h }
    }

    /// Checks numerical rank of each basis equals its column count.
    pub fn validated(f: Matrix, h: Matrix) -> Result<Self> {
        let rf = numerical_rank(&f, None)?;
        if rf < f.cols() {
            return Err(Error::NotFullRank(format!(
                "column basis has rank {} over {} columns",
                rf,
                f.cols()
            )));
        }
        let rh = numerical_rank(&h, None)?;
        if rh < h.cols() {
            return Err(Error::NotFullRank(format!(
                "row basis has rank {} over {} columns",
                rh,
                h.cols()
            )));
        }
        Ok(BasisPair { f, h })
    }
}

/// Left anchor `b` (m×p) and right anchor `d` (n×q), p, q ≥ k.
#[derive(Debug, Clone)]
pub struct SketchPair {
    pub b: Matrix,
    pub d: Matrix,
}

impl SketchPair {
    pub fn new(b: Matrix, d: Matrix) -> Self {
        SketchPair { b, d }
    }
}

/// Solution of the projector equation: `yᵀf = I_k = hᵀx`.
#[derive(Debug, Clone)]
pub struct ProjectorPair {
    pub y: Matrix,
    pub x: Matrix,
    pub k: usize,
}

/// Diagnostics attached to a factorization or a verification pass.
///
/// `detected_rank` is context-dependent: the numerical rank of the mixing
/// matrix when filled by `meta_factorize`, the smaller of the two projector
/// ranks when filled by `verify_idempotent`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorReport {
    pub residual_rel: f64,
    pub idem_defect_p: f64,
    pub idem_defect_r: f64,
    pub detected_rank: usize,
    pub elapsed_seconds: f64,
}

/// A completed factorization `a ≈ f·g·hᵀ`.
#[derive(Debug, Clone)]
pub struct MetaFactorization {
    pub basis: BasisPair,
    pub g: Matrix,
    pub k: usize,
    pub report: FactorReport,
}

impl MetaFactorization {
    pub fn reconstruct(&self) -> Matrix {
        self.basis.f.dot(&self.g).dot(&self.basis.h.t())
    }
}

fn demote_singular(e: Error, what: &str) -> Error {
    match e {
        Error::SingularTriangular { index } => Error::RankDeficientAnchor(format!(
            "{} is numerically singular (pivot {})",
            what, index
        )),
        other => other,
    }
}

/// Solve `yᵀf = I_k` and `hᵀx = I_k` through the anchors:
/// `yᵀ = (bᵀf)⁺bᵀ`, `x = d(hᵀd)⁺`.
///
/// When `bᵀf` and `hᵀd` are square the pseudoinverses collapse to inverses
/// and the solve goes through QR plus one triangular solve; rectangular
/// anchors take the SVD pseudoinverse route and yield oblique projectors.
pub fn solve_projector_equation(basis: &BasisPair, sketch: &SketchPair) -> Result<ProjectorPair> {
    let (m, k) = basis.f.shape();
    let (n, kh) = basis.h.shape();
    if kh != k {
        return Err(Error::DimensionMismatch(format!(
            "basis column counts differ: {} vs {}",
            k, kh
        )));
    }
    if sketch.b.rows() != m || sketch.d.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "anchors are {}x{} and {}x{}, bases need {} and {} rows",
            sketch.b.rows(),
            sketch.b.cols(),
            sketch.d.rows(),
            sketch.d.cols(),
            m,
            n
        )));
    }
    let p = sketch.b.cols();
    let q = sketch.d.cols();
    if p < k || q < k {
        return Err(Error::DimensionMismatch(format!(
            "anchors must have at least k = {} columns, got {} and {}",
            k, p, q
        )));
    }

    let bf = sketch.b.t().dot(&basis.f); // p×k
    let hd = basis.h.t().dot(&sketch.d); // k×q

    let y;
    let x;
    if p == k && q == k {
        let fy = qr(&bf, false, false)?;
        let rhs = fy.q.t().dot(&sketch.b.t());
        let yt = solve_triangular(&fy.r, &rhs, Side::Left, UpLo::Upper)
            .map_err(|e| demote_singular(e, "b'f"))?;
        y = yt.t();

        let fx = qr(&hd, false, false)?;
        let dr = solve_triangular(&fx.r, &sketch.d, Side::Right, UpLo::Upper)
            .map_err(|e| demote_singular(e, "h'd"))?;
        x = dr.dot(&fx.q.t());
    } else {
        if numerical_rank(&bf, None)? < k {
            return Err(Error::RankDeficientAnchor(format!(
                "rank(b'f) < k = {}",
                k
            )));
        }
        if numerical_rank(&hd, None)? < k {
            return Err(Error::RankDeficientAnchor(format!(
                "rank(h'd) < k = {}",
                k
            )));
        }
        y = pinv(&bf, None)?.dot(&sketch.b.t()).t();
        x = sketch.d.dot(&pinv(&hd, None)?);
    }
    Ok(ProjectorPair { y, x, k })
}

fn trace(a: &Matrix) -> f64 {
    (0..a.rows().min(a.cols())).map(|i| a[(i, i)]).sum()
}

/// `‖mΔwᵀ‖_F / ‖mwᵀ‖_F` evaluated through k×k Gram matrices, never
/// forming the m×m outer products: ‖mΔwᵀ‖² = tr(Δᵀ(mᵀm)Δ(wᵀw)).
pub(crate) fn defect_via_gram(m: &Matrix, w: &Matrix, delta: &Matrix) -> f64 {
    let gm = m.t().dot(m);
    let gw = w.t().dot(w);
    let num2 = trace(&delta.t().dot(&gm).dot(delta).dot(&gw)).max(0.0);
    let den2 = trace(&gm.dot(&gw)).max(0.0);
    if den2 == 0.0 {
        0.0
    } else {
        (num2 / den2).sqrt()
    }
}

/// Measure how far `p = f·yᵀ` and `r = x·hᵀ` are from idempotency, and
/// their numerical ranks at relative tolerance `tol`. Reports, never
/// judges: a violated invariant comes back as a large defect.
pub fn verify_idempotent(pair: &ProjectorPair, basis: &BasisPair, tol: f64) -> Result<FactorReport> {
    if pair.y.shape() != basis.f.shape() || pair.x.shape() != basis.h.shape() {
        return Err(Error::DimensionMismatch(format!(
            "projector factors {:?}/{:?} do not match bases {:?}/{:?}",
            pair.y.shape(),
            pair.x.shape(),
            basis.f.shape(),
            basis.h.shape()
        )));
    }
    let start = Instant::now();
    let p = basis.f.dot(&pair.y.t());
    let r = pair.x.dot(&basis.h.t());
    let np = p.norm_fro();
    let nr = r.norm_fro();
    let defect_p = if np == 0.0 {
        0.0
    } else {
        p.dot(&p).sub(&p).norm_fro() / np
    };
    let defect_r = if nr == 0.0 {
        0.0
    } else {
        r.dot(&r).sub(&r).norm_fro() / nr
    };
    let rank_p = numerical_rank(&p, Some(tol))?;
    let rank_r = numerical_rank(&r, Some(tol))?;
    Ok(FactorReport {
        residual_rel: 0.0,
        idem_defect_p: defect_p,
        idem_defect_r: defect_r,
        detected_rank: rank_p.min(rank_r),
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

/// The mixing matrix `g = yᵀ·a·x`, associated to minimize work: the a·x
/// product first when a is wide, yᵀ·a first otherwise.
pub fn mixing_matrix(a: &Matrix, pair: &ProjectorPair) -> Result<Matrix> {
    let (m, n) = a.shape();
    if pair.y.rows() != m || pair.x.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "projector factors {:?}/{:?} do not conform to a {}x{} matrix",
            pair.y.shape(),
            pair.x.shape(),
            m,
            n
        )));
    }
    if m >= n {
        Ok(pair.y.t().dot(a).dot(&pair.x))
    } else {
        Ok(pair.y.t().dot(&a.dot(&pair.x)))
    }
}

/// `f·g·hᵀ`, with the left product formed first.
pub fn reconstruct(f: &Matrix, g: &Matrix, h: &Matrix) -> Result<Matrix> {
    if f.cols() != g.rows() || g.cols() != h.cols() {
        return Err(Error::DimensionMismatch(format!(
            "cannot chain {}x{} · {}x{} · {}x{}",
            f.rows(),
            f.cols(),
            g.rows(),
            g.cols(),
            h.cols(),
            h.rows()
        )));
    }
    Ok(f.dot(g).dot(&h.t()))
}

/// Full pipeline: solve the projector equation, form the mixing matrix,
/// measure the reconstruction. Poor bases are reported through
/// `residual_rel`, never rejected — approximating with a deliberately
/// low-rank basis is a supported use.
pub fn meta_factorize(a: &Matrix, basis: BasisPair, sketch: &SketchPair) -> Result<MetaFactorization> {
    meta_factorize_with_projectors(a, basis, sketch).map(|(fac, _)| fac)
}

/// As `meta_factorize`, additionally handing back the projector pair for
/// callers that want to inspect or reuse `y` and `x`.
pub fn meta_factorize_with_projectors(
    a: &Matrix,
    basis: BasisPair,
    sketch: &SketchPair,
) -> Result<(MetaFactorization, ProjectorPair)> {
    let start = Instant::now();
    if basis.f.rows() != a.rows() || basis.h.rows() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "bases {:?}/{:?} do not conform to a {}x{} matrix",
            basis.f.shape(),
            basis.h.shape(),
            a.rows(),
            a.cols()
        )));
    }
    let pair = solve_projector_equation(&basis, sketch)?;
    let g = mixing_matrix(a, &pair)?;
    let recon = reconstruct(&basis.f, &g, &basis.h)?;

    let diff = recon.sub(a).norm_fro();
    let na = a.norm_fro();
    let residual_rel = if diff == 0.0 { 0.0 } else { diff / na };

    let k = pair.k;
    let dy = pair.y.t().dot(&basis.f).sub(&Matrix::identity(k));
    let dx = basis.h.t().dot(&pair.x).sub(&Matrix::identity(k));
    let idem_defect_p = defect_via_gram(&basis.f, &pair.y, &dy);
    let idem_defect_r = defect_via_gram(&pair.x, &basis.h, &dx);
    let detected_rank = numerical_rank(&g, None)?;

    let report = FactorReport {
        residual_rel,
        idem_defect_p,
        idem_defect_r,
        detected_rank,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    };
    let fac = MetaFactorization {
        basis,
        g,
        k,
        report,
    };
    Ok((fac, pair))
}

/// The full solution family of the mixing-matrix equation:
/// `g(w) = yᵀ·a·x + w − yᵀf·w·hᵀx` for an arbitrary k×k seed `w`.
///
/// The reconstruction `f·g(w)·hᵀ` does not depend on `w`: the homogeneous
/// part is annihilated because `p` and `r` are projectors onto the basis
/// spaces. With square anchors `yᵀf = hᵀx = I` and the extra terms cancel
/// exactly.
pub fn penrose_general_solution(
    a: &Matrix,
    basis: &BasisPair,
    sketch: &SketchPair,
    w: &Matrix,
) -> Result<Matrix> {
    let pair = solve_projector_equation(basis, sketch)?;
    let k = pair.k;
    if w.shape() != (k, k) {
        return Err(Error::DimensionMismatch(format!(
            "w is {}x{}, expected {}x{}",
            w.rows(),
            w.cols(),
            k,
            k
        )));
    }
    let g0 = mixing_matrix(a, &pair)?;
    let yf = pair.y.t().dot(&basis.f);
    let hx = basis.h.t().dot(&pair.x);
    Ok(g0.add(w).sub(&yf.dot(w).dot(&hx)))
}

/// General solution of `a·x = c`: `x = yᵀc + (i − yᵀa)·y_free` with
/// `yᵀ = (bᵀa)⁺bᵀ`. Requires `c` to lie in the column space of `a` and
/// the anchor to preserve its rank; `y_free` only moves `x` within the
/// nullspace of `a`.
pub fn solve_vector_equation(
    a: &Matrix,
    c: &[f64],
    b_anchor: &Matrix,
    y_free: &[f64],
) -> Result<Vec<f64>> {
    let (m, n) = a.shape();
    if c.len() != m || y_free.len() != n || b_anchor.rows() != m {
        return Err(Error::DimensionMismatch(format!(
            "a is {}x{}, c has {}, y_free has {}, anchor has {} rows",
            m,
            n,
            c.len(),
            y_free.len(),
            b_anchor.rows()
        )));
    }

    let ba = b_anchor.t().dot(a);
    if numerical_rank(&ba, None)? < numerical_rank(a, None)? {
        return Err(Error::RankDeficientAnchor(
            "rank(b'a) < rank(a); the anchor loses column-space directions".into(),
        ));
    }

    let norm_c = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm_c > 0.0 {
        let ap = pinv(a, None)?;
        let proj = a.dot_vec(&ap.dot_vec(c));
        let defect = c
            .iter()
            .zip(&proj)
            .map(|(ci, pi)| (ci - pi) * (ci - pi))
            .sum::<f64>()
            .sqrt();
        if defect > 1e-8 * norm_c {
            return Err(Error::InconsistentSystem(format!(
                "c is outside the column space: relative defect {:.3e}",
                defect / norm_c
            )));
        }
    }

    let yt = pinv(&ba, None)?.dot(&b_anchor.t()); // n×m
    let particular = yt.dot_vec(c);
    let ay = a.dot_vec(y_free);
    let shrink = yt.dot_vec(&ay);
    Ok((0..n)
        .map(|i| particular[i] + y_free[i] - shrink[i])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: usize, cols: usize, v: &[f64]) -> Matrix {
        Matrix::new(rows, cols, v.to_vec()).unwrap()
    }

    #[test]
    fn orthonormal_basis_self_anchor_returns_basis() {
        let f = Matrix::eye(3, 2);
        let h = Matrix::eye(3, 2);
        let basis = BasisPair::new(f.clone(), h);
        let sketch = SketchPair::new(f.clone(), Matrix::eye(3, 2));
        let pair = solve_projector_equation(&basis, &sketch).unwrap();
        assert!(pair.y.sub(&f).norm_fro() < 1e-14);
    }

    #[test]
    fn scaled_column_gets_reciprocal_dual() {
        let f = mat(2, 1, &[2.0, 0.0]);
        let basis = BasisPair::new(f.clone(), mat(2, 1, &[1.0, 0.0]));
        let sketch = SketchPair::new(f, mat(2, 1, &[1.0, 0.0]));
        let pair = solve_projector_equation(&basis, &sketch).unwrap();
        assert!((pair.y[(0, 0)] - 0.5).abs() < 1e-15);
        assert!(pair.y[(1, 0)].abs() < 1e-15);
    }

    #[test]
    fn oblique_projector_is_exactly_idempotent_here() {
        let f = mat(2, 1, &[1.0, 1.0]);
        let b = mat(2, 1, &[1.0, 0.0]);
        let basis = BasisPair::new(f.clone(), mat(2, 1, &[1.0, 0.0]));
        let sketch = SketchPair::new(b, mat(2, 1, &[1.0, 0.0]));
        let pair = solve_projector_equation(&basis, &sketch).unwrap();
        assert_eq!(pair.y, mat(2, 1, &[1.0, 0.0]));
        let p = f.dot(&pair.y.t());
        assert_eq!(p, mat(2, 2, &[1.0, 0.0, 1.0, 0.0]));
        assert_eq!(p.dot(&p), p);
    }

    #[test]
    fn degenerate_anchor_is_rejected() {
        let basis = BasisPair::new(Matrix::eye(3, 2), Matrix::eye(3, 2));
        let sketch = SketchPair::new(
            mat(3, 2, &[1.0, 1.0, 1.0, 1.0, 0.0, 0.0]), // b'f has two equal rows
            Matrix::eye(3, 2),
        );
        let err = solve_projector_equation(&basis, &sketch).unwrap_err();
        assert_eq!(err.kind(), "RankDeficientAnchor");
    }

    #[test]
    fn reconstruct_identity_bases_is_identity_on_g() {
        let g = mat(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let out = reconstruct(&Matrix::identity(2), &g, &Matrix::identity(2)).unwrap();
        assert_eq!(out, g);
        let zero = reconstruct(&Matrix::identity(2), &Matrix::zeros(2, 2), &Matrix::identity(2))
            .unwrap();
        assert_eq!(zero, Matrix::zeros(2, 2));
    }

    #[test]
    fn identity_factorizes_to_identity_mixing() {
        let a = Matrix::identity(3);
        let basis = BasisPair::new(Matrix::identity(3), Matrix::identity(3));
        let sketch = SketchPair::new(Matrix::identity(3), Matrix::identity(3));
        let fac = meta_factorize(&a, basis, &sketch).unwrap();
        assert!(fac.g.sub(&Matrix::identity(3)).norm_fro() < 1e-15);
        assert_eq!(fac.report.residual_rel, 0.0);
        assert_eq!(fac.report.detected_rank, 3);
        assert_eq!(fac.k, 3);
    }

    #[test]
    fn identity_mixing_for_identity_input_on_partial_basis() {
        let a = Matrix::identity(4);
        let f = Matrix::eye(4, 2);
        let basis = BasisPair::new(f.clone(), f.clone());
        let sketch = SketchPair::new(f.clone(), f);
        let (fac, pair) = meta_factorize_with_projectors(&a, basis, &sketch).unwrap();
        assert!(fac.g.sub(&Matrix::identity(2)).norm_fro() < 1e-15);
        let report = verify_idempotent(&pair, &fac.basis, 1e-10).unwrap();
        assert_eq!(report.detected_rank, 2);
        assert!(report.idem_defect_p < 1e-14);
        assert!(report.idem_defect_r < 1e-14);
    }

    #[test]
    fn general_solution_collapses_for_square_anchors() {
        let a = mat(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
        let f = Matrix::eye(3, 2);
        let basis = BasisPair::new(f.clone(), f.clone());
        let sketch = SketchPair::new(f.clone(), f);
        let w = mat(2, 2, &[5.0, -2.0, 7.0, 11.0]);
        let g0 = penrose_general_solution(&a, &basis, &sketch, &Matrix::zeros(2, 2)).unwrap();
        let gw = penrose_general_solution(&a, &basis, &sketch, &w).unwrap();
        assert!(gw.sub(&g0).norm_fro() <= 256.0 * 2.0 * f64::EPSILON * 25.0);
    }

    #[test]
    fn vector_equation_identity_case() {
        let a = Matrix::identity(2);
        let x = solve_vector_equation(&a, &[1.0, 2.0], &Matrix::identity(2), &[9.0, -3.0])
            .unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn vector_equation_minimum_norm_and_nullspace_shift() {
        let a = mat(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let c = [1.0, 2.0];
        let x0 = solve_vector_equation(&a, &c, &a, &[0.0, 0.0]).unwrap();
        assert!((x0[0] - 0.2).abs() < 1e-12 && (x0[1] - 0.4).abs() < 1e-12);

        let x1 = solve_vector_equation(&a, &c, &a, &[2.0, -1.0]).unwrap();
        let ax = a.dot_vec(&x1);
        assert!((ax[0] - 1.0).abs() < 1e-12 && (ax[1] - 2.0).abs() < 1e-12);
        assert!((x1[0] - x0[0]).abs() > 1e-3, "free term must move x");
    }

    #[test]
    fn vector_equation_rejects_inconsistent_rhs() {
        let a = mat(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let err = solve_vector_equation(&a, &[1.0, 0.0], &a, &[0.0, 0.0]).unwrap_err();
        assert_eq!(err.kind(), "InconsistentSystem");
    }

    #[test]
    fn validated_basis_rejects_dependent_columns() {
        let f = mat(3, 2, &[1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
        let err = BasisPair::validated(f, Matrix::eye(3, 2)).unwrap_err();
        assert_eq!(err.kind(), "NotFullRank");
    }
}
