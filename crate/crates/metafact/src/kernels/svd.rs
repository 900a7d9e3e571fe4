//! Thin SVD via Householder bidiagonalization and implicit-shift QR iteration.
//!
//! The iteration is the classic Golub-Kahan-Reinsch scheme with the four-case
//! deflation logic (split, zero diagonal, shifted QR step, convergence). Wide
//! inputs go through the transposed problem. Both accumulators only ever see
//! orthogonal updates, so U and V keep orthonormal columns even at exact rank
//! deficiency.

use super::{check_finite, check_nonempty};
use crate::{Matrix, Result};

pub struct SvdFactors {
    /// `m x min(m,n)`, orthonormal columns.
    pub u: Matrix,
    /// Singular values, non-negative and non-increasing.
    pub s: Vec<f64>,
    /// `n x min(m,n)`, orthonormal columns.
    pub v: Matrix,
}

impl SvdFactors {
    /// `u * diag(s) * v^T`.
    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.u.clone();
        for j in 0..self.s.len() {
            for i in 0..us.rows() {
                us[(i, j)] *= self.s[j];
            }
        }
        us.dot(&self.v.t())
    }
}

pub fn svd(a: &Matrix) -> Result<SvdFactors> {
    check_nonempty(a, "svd input")?;
    check_finite(a, "svd input")?;
    let mut f = if a.rows() >= a.cols() {
        svd_tall(a)
    } else {
        let t = svd_tall(&a.t());
        SvdFactors { u: t.v, s: t.s, v: t.u }
    };
    // sign convention: first nonzero entry of each left singular vector >= 0
    for j in 0..f.s.len() {
        let mut lead = 0.0;
        for i in 0..f.u.rows() {
            if f.u[(i, j)] != 0.0 {
                lead = f.u[(i, j)];
                break;
            }
        }
        if lead < 0.0 {
            for i in 0..f.u.rows() {
                f.u[(i, j)] = -f.u[(i, j)];
            }
            for i in 0..f.v.rows() {
                f.v[(i, j)] = -f.v[(i, j)];
            }
        }
    }
    Ok(f)
}

/// Core decomposition for m >= n >= 1.
fn svd_tall(a: &Matrix) -> SvdFactors {
    let (m, n) = a.shape();
    debug_assert!(m >= n && n >= 1);
    let nu = n;
    let mut aa = a.clone();
    let mut s = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut u = Matrix::zeros(m, nu);
    let mut v = Matrix::zeros(n, n);
    let mut work = vec![0.0; m];

    // Householder bidiagonalization, storing the reflectors in aa/e for the
    // back-accumulation passes below.
    let nct = (m - 1).min(n);
    let nrt = n.saturating_sub(2);
    for k in 0..nct.max(nrt) {
        if k < nct {
            let mut nrm = 0.0f64;
            for i in k..m {
                nrm = nrm.hypot(aa[(i, k)]);
            }
            s[k] = nrm;
            if s[k] != 0.0 {
                if aa[(k, k)] < 0.0 {
                    s[k] = -s[k];
                }
                for i in k..m {
                    aa[(i, k)] /= s[k];
                }
                aa[(k, k)] += 1.0;
            }
            s[k] = -s[k];
        }
        for j in (k + 1)..n {
            if k < nct && s[k] != 0.0 {
                let mut t = 0.0;
                for i in k..m {
                    t += aa[(i, k)] * aa[(i, j)];
                }
                t = -t / aa[(k, k)];
                for i in k..m {
                    aa[(i, j)] += t * aa[(i, k)];
                }
            }
            e[j] = aa[(k, j)];
        }
        if k < nct {
            for i in k..m {
                u[(i, k)] = aa[(i, k)];
            }
        }
        if k < nrt {
            let mut nrm = 0.0f64;
            for item in e.iter().take(n).skip(k + 1) {
                nrm = nrm.hypot(*item);
            }
            e[k] = nrm;
            if e[k] != 0.0 {
                if e[k + 1] < 0.0 {
                    e[k] = -e[k];
                }
                let ek = e[k];
                for item in e.iter_mut().take(n).skip(k + 1) {
                    *item /= ek;
                }
                e[k + 1] += 1.0;
            }
            e[k] = -e[k];
            if k + 1 < m && e[k] != 0.0 {
                for item in work.iter_mut().take(m).skip(k + 1) {
                    *item = 0.0;
                }
                for j in (k + 1)..n {
                    for i in (k + 1)..m {
                        work[i] += e[j] * aa[(i, j)];
                    }
                }
                for j in (k + 1)..n {
                    let t = -e[j] / e[k + 1];
                    for i in (k + 1)..m {
                        aa[(i, j)] += t * work[i];
                    }
                }
            }
            for i in (k + 1)..n {
                v[(i, k)] = e[i];
            }
        }
    }

    // final entries of the bidiagonal
    let mut p = n.min(m + 1);
    if nct < n {
        s[nct] = aa[(nct, nct)];
    }
    if m < p {
        s[p - 1] = 0.0;
    }
    if nrt + 1 < p {
        e[nrt] = aa[(nrt, p - 1)];
    }
    e[p - 1] = 0.0;

    // back-accumulate U
    for j in nct..nu {
        for i in 0..m {
            u[(i, j)] = 0.0;
        }
        u[(j, j)] = 1.0;
    }
    for k in (0..nct).rev() {
        if s[k] != 0.0 {
            for j in (k + 1)..nu {
                let mut t = 0.0;
                for i in k..m {
                    t += u[(i, k)] * u[(i, j)];
                }
                t = -t / u[(k, k)];
                for i in k..m {
                    u[(i, j)] += t * u[(i, k)];
                }
            }
            for i in k..m {
                u[(i, k)] = -u[(i, k)];
            }
            u[(k, k)] += 1.0;
        } else {
            for i in 0..m {
                u[(i, k)] = 0.0;
            }
            u[(k, k)] = 1.0;
        }
    }

    // back-accumulate V
    for k in (0..n).rev() {
        if k < nrt && e[k] != 0.0 {
            for j in (k + 1)..n {
                let mut t = 0.0;
                for i in (k + 1)..n {
                    t += v[(i, k)] * v[(i, j)];
                }
                t = -t / v[(k + 1, k)];
                for i in (k + 1)..n {
                    v[(i, j)] += t * v[(i, k)];
                }
            }
        }
        for i in 0..n {
            v[(i, k)] = 0.0;
        }
        v[(k, k)] = 1.0;
    }

    // implicit-shift QR iteration on the bidiagonal
    let pp = p - 1;
    let mut iter = 0usize;
    let eps = 2.0f64.powi(-52);
    let tiny = 2.0f64.powi(-966);
    while p > 0 {
        // deflation scan: kk is the start of the active block minus one
        let mut kk: isize = p as isize - 2;
        while kk >= 0 {
            let k = kk as usize;
            if e[k].abs() <= tiny + eps * (s[k].abs() + s[k + 1].abs()) {
                e[k] = 0.0;
                break;
            }
            kk -= 1;
        }
        let kase;
        if kk == p as isize - 2 {
            kase = 4;
        } else {
            let mut ks: isize = p as isize - 1;
            while ks > kk {
                let k = ks as usize;
                let t = if ks != p as isize { e[k].abs() } else { 0.0 }
                    + if ks != kk + 1 { e[k - 1].abs() } else { 0.0 };
                if s[k].abs() <= tiny + eps * t {
                    s[k] = 0.0;
                    break;
                }
                ks -= 1;
            }
            if ks == kk {
                kase = 3;
            } else if ks == p as isize - 1 {
                kase = 1;
            } else {
                kase = 2;
                kk = ks;
            }
        }
        let k = (kk + 1) as usize;

        match kase {
            // e[p-2] negligible: rotate it away against column p-1 of V
            1 => {
                let mut f = e[p - 2];
                e[p - 2] = 0.0;
                for j in (k..=(p - 2)).rev() {
                    let mut t = s[j].hypot(f);
                    let cs = s[j] / t;
                    let sn = f / t;
                    s[j] = t;
                    if j != k {
                        f = -sn * e[j - 1];
                        e[j - 1] *= cs;
                    }
                    for i in 0..n {
                        t = cs * v[(i, j)] + sn * v[(i, p - 1)];
                        v[(i, p - 1)] = -sn * v[(i, j)] + cs * v[(i, p - 1)];
                        v[(i, j)] = t;
                    }
                }
            }
            // s[k-1] negligible: chase e[k-1] rightward against column k-1 of U
            2 => {
                let mut f = e[k - 1];
                e[k - 1] = 0.0;
                for j in k..p {
                    let mut t = s[j].hypot(f);
                    let cs = s[j] / t;
                    let sn = f / t;
                    s[j] = t;
                    f = -sn * e[j];
                    e[j] *= cs;
                    for i in 0..m {
                        t = cs * u[(i, j)] + sn * u[(i, k - 1)];
                        u[(i, k - 1)] = -sn * u[(i, j)] + cs * u[(i, k - 1)];
                        u[(i, j)] = t;
                    }
                }
            }
            // one shifted QR step on the active block
            3 => {
                let scale = s[p - 1]
                    .abs()
                    .max(s[p - 2].abs())
                    .max(e[p - 2].abs())
                    .max(s[k].abs())
                    .max(e[k].abs());
                let sp = s[p - 1] / scale;
                let spm1 = s[p - 2] / scale;
                let epm1 = e[p - 2] / scale;
                let sk = s[k] / scale;
                let ek = e[k] / scale;
                let b = ((spm1 + sp) * (spm1 - sp) + epm1 * epm1) / 2.0;
                let c = (sp * epm1) * (sp * epm1);
                let mut shift = 0.0;
                if b != 0.0 || c != 0.0 {
                    shift = (b * b + c).sqrt();
                    if b < 0.0 {
                        shift = -shift;
                    }
                    shift = c / (b + shift);
                }
                let mut f = (sk + sp) * (sk - sp) + shift;
                let mut g = sk * ek;
                for j in k..(p - 1) {
                    let mut t = f.hypot(g);
                    let mut cs = f / t;
                    let mut sn = g / t;
                    if j != k {
                        e[j - 1] = t;
                    }
                    f = cs * s[j] + sn * e[j];
                    e[j] = cs * e[j] - sn * s[j];
                    g = sn * s[j + 1];
                    s[j + 1] *= cs;
                    for i in 0..n {
                        t = cs * v[(i, j)] + sn * v[(i, j + 1)];
                        v[(i, j + 1)] = -sn * v[(i, j)] + cs * v[(i, j + 1)];
                        v[(i, j)] = t;
                    }
                    t = f.hypot(g);
                    cs = f / t;
                    sn = g / t;
                    s[j] = t;
                    f = cs * e[j] + sn * s[j + 1];
                    s[j + 1] = -sn * e[j] + cs * s[j + 1];
                    g = sn * e[j + 1];
                    e[j + 1] *= cs;
                    if j < m - 1 {
                        for i in 0..m {
                            t = cs * u[(i, j)] + sn * u[(i, j + 1)];
                            u[(i, j + 1)] = -sn * u[(i, j)] + cs * u[(i, j + 1)];
                            u[(i, j)] = t;
                        }
                    }
                }
                e[p - 2] = f;
                iter += 1;
                // bidiagonal QR converges in practice; this cap is a guard
                // against a stalled iteration, not an expected path
                if iter > 500 {
                    break;
                }
            }
            // s[k] converged: fix its sign and bubble it into sorted position
            _ => {
                if s[k] <= 0.0 {
                    s[k] = if s[k] < 0.0 { -s[k] } else { 0.0 };
                    for i in 0..=pp {
                        v[(i, k)] = -v[(i, k)];
                    }
                }
                let mut k = k;
                while k < pp {
                    if s[k] >= s[k + 1] {
                        break;
                    }
                    s.swap(k, k + 1);
                    if k < n - 1 {
                        for i in 0..n {
                            let t = v[(i, k + 1)];
                            v[(i, k + 1)] = v[(i, k)];
                            v[(i, k)] = t;
                        }
                    }
                    if k < m - 1 {
                        for i in 0..m {
                            let t = u[(i, k + 1)];
                            u[(i, k + 1)] = u[(i, k)];
                            u[(i, k)] = t;
                        }
                    }
                    k += 1;
                }
                iter = 0;
                p -= 1;
            }
        }
    }

    SvdFactors { u, s, v }
}
