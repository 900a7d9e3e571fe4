//! Properties of the projector-equation solver and the factorization
//! pipeline on randomly drawn instances.

mod common;

use common::{cond, gauss, orthonormal, rank_k, rng};
use metafact::core::{
    meta_factorize, meta_factorize_with_projectors, penrose_general_solution,
    solve_projector_equation, verify_idempotent, BasisPair, SketchPair,
};
use metafact::kernels::svd;
use metafact::Matrix;
use proptest::prelude::*;

fn full_rank_basis(seed: u64, m: usize, n: usize, k: usize) -> (Matrix, Matrix) {
    let mut r = rng(seed);
    (gauss(&mut r, m, k), gauss(&mut r, n, k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn square_solve_inverts_both_bases(
        m in 3usize..=50, n in 3usize..=50, kk in 1usize..=10, seed in any::<u64>()
    ) {
        let k = kk.min(m).min(n);
        let (f, h) = full_rank_basis(seed, m, n, k);
        // identity defects grow like eps·κ²; κ ≤ 1e2 keeps the 1e-10
        // bounds honest, anything past that is a conditioning statement
        prop_assume!(cond(&f).max(cond(&h)) <= 1e2);
        let basis = BasisPair::new(f.clone(), h.clone());
        let sketch = SketchPair::new(f.clone(), h.clone());
        let pair = solve_projector_equation(&basis, &sketch).unwrap();

        let dy = pair.y.t().dot(&f).sub(&Matrix::identity(k)).norm_fro();
        let dx = h.t().dot(&pair.x).sub(&Matrix::identity(k)).norm_fro();
        prop_assert!(dy <= 1e-10, "y'f defect {:e}", dy);
        prop_assert!(dx <= 1e-10, "h'x defect {:e}", dx);

        let report = verify_idempotent(&pair, &basis, 1e-8).unwrap();
        prop_assert!(report.idem_defect_p <= 1e-10);
        prop_assert!(report.idem_defect_r <= 1e-10);
        prop_assert_eq!(report.detected_rank, k);
    }

    #[test]
    fn oblique_solve_gives_one_sided_inverses(
        m in 4usize..=60, n in 4usize..=60, kk in 1usize..=10,
        extra in 1usize..=5, seed in any::<u64>()
    ) {
        let k = kk.min(m - 1).min(n - 1);
        let p = (k + extra).min(m);
        let q = (k + extra).min(n);
        let mut r = rng(seed);
        let f = gauss(&mut r, m, k);
        let h = gauss(&mut r, n, k);
        let b = gauss(&mut r, m, p);
        let d = gauss(&mut r, n, q);
        // the oblique solve runs through bᵀf and dᵀh, so their
        // conditioning — subspace alignment included — is what matters
        prop_assume!(cond(&b.t().dot(&f)).max(cond(&d.t().dot(&h))) <= 1e2);
        let basis = BasisPair::new(f.clone(), h.clone());
        let sketch = SketchPair::new(b, d);
        let pair = solve_projector_equation(&basis, &sketch).unwrap();

        // One-sided inverse identities that survive oblique anchors.
        let fyf = f.dot(&pair.y.t()).dot(&f).sub(&f).norm_fro();
        prop_assert!(fyf <= 1e-9 * f.norm_fro(), "f y'f - f: {:e}", fyf);
        let ht = h.t();
        let hxh = ht.dot(&pair.x).dot(&ht).sub(&ht).norm_fro();
        prop_assert!(hxh <= 1e-9 * h.norm_fro(), "h'x h' - h': {:e}", hxh);

        let report = verify_idempotent(&pair, &basis, 1e-8).unwrap();
        prop_assert!(report.idem_defect_p <= 1e-9);
        prop_assert!(report.idem_defect_r <= 1e-9);
        prop_assert_eq!(report.detected_rank, k);
    }

    #[test]
    fn exact_bases_reconstruct_exactly(
        m in 5usize..=40, n in 5usize..=40, kk in 1usize..=8, seed in any::<u64>()
    ) {
        let k = kk.min(m).min(n);
        let a = rank_k(&mut rng(seed), m, n, k);
        let sv = svd(&a).unwrap();
        let f = sv.u.slice_cols(0, k);
        let h = sv.v.slice_cols(0, k);
        let basis = BasisPair::new(f.clone(), h.clone());
        let sketch = SketchPair::new(f, h);
        let fac = meta_factorize(&a, basis, &sketch).unwrap();
        prop_assert!(fac.report.residual_rel <= 1e-10, "residual {:e}", fac.report.residual_rel);
        prop_assert_eq!(fac.report.detected_rank, k);
        prop_assert!(fac.report.idem_defect_p <= 1e-10);
        prop_assert!(fac.report.idem_defect_r <= 1e-10);
        prop_assert!(fac.report.elapsed_seconds.is_finite() && fac.report.elapsed_seconds >= 0.0);
    }

    #[test]
    fn homogeneous_part_vanishes_under_reconstruction(
        m in 4usize..=40, n in 4usize..=40, kk in 1usize..=8,
        extra in 0usize..=4, seed in any::<u64>()
    ) {
        let k = kk.min(m - 1).min(n - 1);
        let mut r = rng(seed);
        let a = gauss(&mut r, m, n);
        let f = gauss(&mut r, m, k);
        let h = gauss(&mut r, n, k);
        let b = gauss(&mut r, m, (k + extra).min(m));
        let d = gauss(&mut r, n, (k + extra).min(n));
        prop_assume!(cond(&b.t().dot(&f)).max(cond(&d.t().dot(&h))) <= 1e2);
        let basis = BasisPair::new(f.clone(), h.clone());
        let sketch = SketchPair::new(b, d);
        let w = gauss(&mut r, k, k);
        let pair = solve_projector_equation(&basis, &sketch).unwrap();

        // f·(w − y'f·w·h'x)·h' = 0: the seed term is swallowed by the projectors.
        let yf = pair.y.t().dot(&f);
        let hx = h.t().dot(&pair.x);
        let hom = f.dot(&w.sub(&yf.dot(&w).dot(&hx))).dot(&h.t()).norm_fro();
        let cap = 1e-10 * f.norm_fro() * w.norm_fro() * h.norm_fro();
        prop_assert!(hom <= cap, "homogeneous leak {:e} > {:e}", hom, cap);

        // Hence the general solution reconstructs independently of w.
        let g0 = penrose_general_solution(&a, &basis, &sketch, &Matrix::zeros(k, k)).unwrap();
        let gw = penrose_general_solution(&a, &basis, &sketch, &w).unwrap();
        let drift = f.dot(&gw).dot(&h.t()).sub(&f.dot(&g0).dot(&h.t())).norm_fro();
        prop_assert!(drift <= 1e-10 * a.norm_fro(), "reconstruction drift {:e}", drift);
    }

    #[test]
    fn projector_ignores_column_scaling(
        m in 3usize..=40, n in 3usize..=40, kk in 1usize..=8, seed in any::<u64>()
    ) {
        let k = kk.min(m).min(n);
        let (f, h) = full_rank_basis(seed, m, n, k);
        let mut r = rng(seed ^ 0x9e37_79b9);
        let scales: Vec<f64> = (0..k)
            .map(|_| {
            use rand::Rng;
            let v: f64 = r.gen_range(0.25..4.0);
            v
        })
            .collect();
        let mut fs = f.clone();
        for j in 0..k {
            for i in 0..m {
                fs[(i, j)] *= scales[j];
            }
        }
        // the scaled copy must clear the gate too: a 16× scale spread can
        // push κ(fs) well past κ(f)
        prop_assume!(cond(&f).max(cond(&fs)).max(cond(&h)) <= 1e2);

        let pair = solve_projector_equation(
            &BasisPair::new(f.clone(), h.clone()),
            &SketchPair::new(f.clone(), h.clone()),
        )
        .unwrap();
        let pair_s = solve_projector_equation(
            &BasisPair::new(fs.clone(), h.clone()),
            &SketchPair::new(fs.clone(), h),
        )
        .unwrap();

        let p = f.dot(&pair.y.t());
        let ps = fs.dot(&pair_s.y.t());
        let drift = ps.sub(&p).norm_fro();
        prop_assert!(drift <= 1e-10 * p.norm_fro(), "projector drift {:e}", drift);
    }
}

#[test]
fn low_rank_basis_reports_truncation_error() {
    let mut r = rng(7);
    let a = rank_k(&mut r, 20, 15, 5);
    let sv = svd(&a).unwrap();

    let f = sv.u.slice_cols(0, 3);
    let h = sv.v.slice_cols(0, 3);
    let basis = BasisPair::new(f.clone(), h.clone());
    let sketch = SketchPair::new(f, h);
    let fac = meta_factorize(&a, basis, &sketch).unwrap();

    // With orthonormal singular bases the reconstruction is the rank-3
    // truncation, so the report must carry exactly the tail energy.
    let tail = (sv.s[3] * sv.s[3] + sv.s[4] * sv.s[4]).sqrt();
    let expect = tail / a.norm_fro();
    assert!(fac.report.residual_rel > 0.0);
    assert!(
        (fac.report.residual_rel - expect).abs() <= 1e-9,
        "reported {:e}, truncation oracle {:e}",
        fac.report.residual_rel,
        expect
    );
    assert_eq!(fac.report.detected_rank, 3);
}

#[test]
fn projectors_returned_alongside_factorization_are_consistent() {
    let mut r = rng(11);
    let a = rank_k(&mut r, 12, 9, 4);
    let f = orthonormal(&mut r, 12, 4);
    let h = orthonormal(&mut r, 9, 4);
    let basis = BasisPair::new(f, h);
    let sketch = SketchPair::new(gauss(&mut r, 12, 6), gauss(&mut r, 9, 6));
    let (fac, pair) = meta_factorize_with_projectors(&a, basis, &sketch).unwrap();

    let by_hand = pair.y.t().dot(&a).dot(&pair.x);
    assert!(by_hand.sub(&fac.g).norm_fro() <= 1e-12 * fac.g.norm_fro().max(1.0));
}
