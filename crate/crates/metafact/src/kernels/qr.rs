//! Householder QR with optional greedy column pivoting and full/thin Q.

use super::{check_finite, check_nonempty, house};
use crate::{Matrix, Result};

pub struct QrFactors {
    /// Orthonormal columns; `m x min(m,n)` thin, `m x m` when full.
    pub q: Matrix,
    /// Upper triangular/trapezoidal with exact zeros below the diagonal;
    /// `min(m,n) x n` thin, `m x n` when full. Diagonal entries are >= 0.
    pub r: Matrix,
    /// Processing order: column j of `q*r` is column `perm[j]` of the input.
    /// Identity when pivoting is disabled.
    pub perm: Vec<usize>,
}

impl QrFactors {
    /// Reassembles the input: scatters `q*r` back through `perm`.
    pub fn reconstruct(&self) -> Matrix {
        self.q.dot(&self.r).scatter_cols(&self.perm)
    }
}

pub fn qr(a: &Matrix, pivot: bool, full: bool) -> Result<QrFactors> {
    check_nonempty(a, "qr input")?;
    check_finite(a, "qr input")?;
    let (m, n) = a.shape();
    let kmax = m.min(n);
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut betas = vec![0.0; kmax];

    for k in 0..kmax {
        if pivot {
            // move the trailing column of largest norm to position k
            let mut best = k;
            let mut best_norm = tail_norm2(&w, k, k);
            for j in (k + 1)..n {
                let nj = tail_norm2(&w, k, j);
                if nj > best_norm {
                    best = j;
                    best_norm = nj;
                }
            }
            if best != k {
                for i in 0..m {
                    let t = w[(i, k)];
                    w[(i, k)] = w[(i, best)];
                    w[(i, best)] = t;
                }
                perm.swap(k, best);
            }
        }
        let x: Vec<f64> = (k..m).map(|i| w[(i, k)]).collect();
        let (v, beta, mu) = house(&x);
        betas[k] = beta;
        w[(k, k)] = mu;
        // reflector tail lives below the diagonal until Q is accumulated
        for i in (k + 1)..m {
            w[(i, k)] = v[i - k];
        }
        for j in (k + 1)..n {
            let mut dot = w[(k, j)];
            for i in (k + 1)..m {
                dot += v[i - k] * w[(i, j)];
            }
            let t = beta * dot;
            w[(k, j)] -= t;
            for i in (k + 1)..m {
                w[(i, j)] -= t * v[i - k];
            }
        }
    }

    let r_rows = if full { m } else { kmax };
    let mut r = Matrix::zeros(r_rows, n);
    for i in 0..r_rows.min(kmax) {
        for j in i..n {
            r[(i, j)] = w[(i, j)];
        }
    }

    // accumulate Q by applying the reflectors in reverse to an identity block
    let q_cols = if full { m } else { kmax };
    let mut q = Matrix::eye(m, q_cols);
    for k in (0..kmax).rev() {
        let beta = betas[k];
        if beta == 0.0 {
            continue;
        }
        // columns left of k still have zero tails below row k, so skip them
        for j in k..q_cols {
            let mut dot = q[(k, j)];
            for i in (k + 1)..m {
                dot += w[(i, k)] * q[(i, j)];
            }
            let t = beta * dot;
            q[(k, j)] -= t;
            for i in (k + 1)..m {
                q[(i, j)] -= t * w[(i, k)];
            }
        }
    }

    Ok(QrFactors { q, r, perm })
}

fn tail_norm2(w: &Matrix, from_row: usize, j: usize) -> f64 {
    (from_row..w.rows()).map(|i| w[(i, j)] * w[(i, j)]).sum()
}
