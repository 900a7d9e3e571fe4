//! Shared helpers for integration tests: seeded random instances and an
//! independent Jacobi eigenvalue oracle for cross-checking the SVD kernels.

#![allow(dead_code)]

use metafact::Matrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gauss(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Matrix {
    let data: Vec<f64> = (0..m * n).map(|_| rng.sample(StandardNormal)).collect();
    Matrix::new(m, n, data).unwrap()
}

/// Random matrix of exact rank k (product of two Gaussian factors).
pub fn rank_k(rng: &mut ChaCha8Rng, m: usize, n: usize, k: usize) -> Matrix {
    assert!(k >= 1 && k <= m.min(n));
    gauss(rng, m, k).dot(&gauss(rng, k, n))
}

/// Random matrix with orthonormal columns, by QR of a Gaussian.
pub fn orthonormal(rng: &mut ChaCha8Rng, m: usize, k: usize) -> Matrix {
    let g = gauss(rng, m, k);
    metafact::kernels::qr(&g, false, false).unwrap().q
}

/// σ_max/σ_min; +∞ when σ_min underflows, so it fails any conditioning
/// gate. Random draws have unbounded condition tails (square Gaussian
/// blocks in particular), and fixed test tolerances only mean something
/// below a stated κ — tests gate their draws with this.
pub fn cond(a: &Matrix) -> f64 {
    let s = metafact::kernels::svd(a).unwrap().s;
    s[0] / s[s.len() - 1]
}

/// Matrix with prescribed singular values (descending not required).
pub fn with_singular_values(rng: &mut ChaCha8Rng, m: usize, n: usize, sv: &[f64]) -> Matrix {
    let p = m.min(n);
    assert_eq!(sv.len(), p);
    let u = orthonormal(rng, m, p);
    let v = orthonormal(rng, n, p);
    let mut us = u;
    for j in 0..p {
        for i in 0..m {
            us[(i, j)] *= sv[j];
        }
    }
    us.dot(&v.t())
}

/// Eigenvalues of a symmetric matrix by classical cyclic Jacobi rotations,
/// sorted descending. Independent of the library's SVD path on purpose.
pub fn jacobi_eigenvalues(a: &Matrix) -> Vec<f64> {
    assert!(a.is_square());
    let n = a.rows();
    let mut w = a.clone();
    for _sweep in 0..200 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += w[(i, j)] * w[(i, j)];
            }
        }
        if off.sqrt() <= 1e-15 * w.norm_fro().max(1e-300) {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = w[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (w[(q, q)] - w[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = w[(k, p)];
                    let akq = w[(k, q)];
                    w[(k, p)] = c * akp - s * akq;
                    w[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = w[(p, k)];
                    let aqk = w[(q, k)];
                    w[(p, k)] = c * apk - s * aqk;
                    w[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| w[(i, i)]).collect();
    ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
    ev
}

pub fn assert_matrix_close(a: &Matrix, b: &Matrix, tol: f64, label: &str) {
    assert_eq!(a.shape(), b.shape(), "{}: shape mismatch", label);
    let diff = a.sub(b).norm_fro();
    assert!(
        diff <= tol,
        "{}: difference {:.3e} exceeds {:.3e}",
        label,
        diff,
        tol
    );
}
