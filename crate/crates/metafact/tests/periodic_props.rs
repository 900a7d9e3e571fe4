mod common;

use common::*;
use metafact::core::{meta_factorize, BasisPair, SketchPair};
use metafact::kernels::pinv;
use metafact::periodic::{
    make_cyclic_generator, periodic_meta_factorize, verify_periodicity, GeneratorKind,
    PeriodicGenerators,
};
use metafact::Matrix;
use proptest::prelude::*;

fn power(z: &Matrix, n: usize) -> Matrix {
    let mut out = Matrix::identity(z.rows());
    for _ in 0..n {
        out = out.dot(z);
    }
    out
}

/// Pick (k, n_period) so the requested family can be built: shifts need
/// n | k, rotations need k even.
fn admissible(kind: GeneratorKind, n_period: usize, size_knob: usize) -> usize {
    match kind {
        GeneratorKind::Shift => n_period * size_knob.clamp(1, 8 / n_period.min(8)).max(1),
        GeneratorKind::Rotation => 2 * size_knob.clamp(1, 4),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    // The n-th power of each one-sided map collapses to the orthogonal
    // projector of its factor: (f·yᵀ)^n = f·f⁺ and (x·hᵀ)^n = (hᵀ)⁺·hᵀ.
    #[test]
    fn projector_powers_collapse_to_orthogonal_projectors(
        seed in 0u64..1u64 << 40,
        n_period in 1usize..7,
        size_knob in 1usize..5,
        rotation in proptest::bool::ANY,
    ) {
        let kind = if rotation { GeneratorKind::Rotation } else { GeneratorKind::Shift };
        let k = admissible(kind, n_period, size_knob);
        prop_assume!(k <= 8);
        let mut r = rng(seed);
        let m = k + 4;
        let n = k + 3;
        let a = gauss(&mut r, m, n);
        let f = gauss(&mut r, m, k);
        let h = gauss(&mut r, n, k);
        // n_period-fold powers compound the eps·κ² solve error
        prop_assume!(cond(&f).max(cond(&h)) <= 1e2);

        let z = make_cyclic_generator(k, n_period, kind).unwrap();
        let gen = PeriodicGenerators::new(z.clone(), z, n_period).unwrap();
        let basis = BasisPair::new(f.clone(), h.clone());
        let (_, pair) = periodic_meta_factorize(&a, &basis, &gen).unwrap();

        let fy_n = power(&f.dot(&pair.y.t()), n_period);
        let ff = f.dot(&pinv(&f, None).unwrap());
        prop_assert!(
            fy_n.sub(&ff).norm_fro() <= 1e-9 * ff.norm_fro(),
            "left map power {}",
            fy_n.sub(&ff).norm_fro()
        );

        let xh_n = power(&pair.x.dot(&h.t()), n_period);
        let hh = pinv(&h.t(), None).unwrap().dot(&h.t());
        prop_assert!(
            xh_n.sub(&hh).norm_fro() <= 1e-9 * hh.norm_fro(),
            "right map power {}",
            xh_n.sub(&hh).norm_fro()
        );
    }

    // With bases spanning both fundamental subspaces, every multiple of
    // the period restores a, through p_max = 4.
    #[test]
    fn periodicity_holds_through_four_periods(
        seed in 0u64..1u64 << 40,
        n_period in 1usize..7,
        size_knob in 1usize..5,
        rotation in proptest::bool::ANY,
    ) {
        let kind = if rotation { GeneratorKind::Rotation } else { GeneratorKind::Shift };
        let k = admissible(kind, n_period, size_knob);
        prop_assume!(k <= 8);
        let mut r = rng(seed);
        let m = k + 6;
        let n = k + 4;

        // exact rank-k input with bases that span its column/row spaces,
        // deliberately non-orthonormal through k×k mixing
        let u = orthonormal(&mut r, m, k);
        let v = orthonormal(&mut r, n, k);
        let sv: Vec<f64> = (0..k).map(|j| 2.0 + j as f64).collect();
        let a = u.dot(&Matrix::diag(&sv)).dot(&v.t());
        let mix_f = gauss(&mut r, k, k);
        let mix_h = gauss(&mut r, k, k);
        // square Gaussian mixers carry the usual unbounded κ tail, and the
        // at-period residual compounds it over up to four round trips
        prop_assume!(cond(&mix_f).max(cond(&mix_h)) <= 1e2);
        let f = u.dot(&mix_f);
        let h = v.dot(&mix_h);

        let z = make_cyclic_generator(k, n_period, kind).unwrap();
        let gen = PeriodicGenerators::new(z.clone(), z, n_period).unwrap();
        let basis = BasisPair::new(f, h);
        let (_, pair) = periodic_meta_factorize(&a, &basis, &gen).unwrap();

        let report = verify_periodicity(&a, &basis, &pair, &gen, 4).unwrap();
        prop_assert_eq!(report.residuals.len(), 4 * n_period + 1);
        prop_assert!(
            report.worst_at_period() <= 1e-8,
            "worst at-period residual {}",
            report.worst_at_period()
        );
    }

    // Identity generators with period 1 are ordinary meta-factorization.
    #[test]
    fn trivial_period_matches_plain_solver(
        seed in 0u64..1u64 << 40,
        m in 4usize..20,
        n in 4usize..20,
        kk in 1usize..5,
    ) {
        let k = kk.min(m).min(n);
        let mut r = rng(seed);
        let a = gauss(&mut r, m, n);
        let f = orthonormal(&mut r, m, k);
        let h = orthonormal(&mut r, n, k);

        let gen = PeriodicGenerators::new(Matrix::identity(k), Matrix::identity(k), 1).unwrap();
        let (pfac, ppair) = periodic_meta_factorize(&a, &BasisPair::new(f.clone(), h.clone()), &gen).unwrap();

        let plain = meta_factorize(
            &a,
            BasisPair::new(f.clone(), h.clone()),
            &SketchPair { b: f, d: h },
        ).unwrap();

        let scale = plain.g.norm_fro().max(1.0);
        prop_assert!(pfac.g.sub(&plain.g).norm_fro() <= 1e-11 * scale);
        prop_assert!((pfac.report.residual_rel - plain.report.residual_rel).abs() <= 1e-11);
        let _ = ppair;
    }
}
