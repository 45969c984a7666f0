//! Householder QR with column pivoting.

use super::matrix::norm2;
use super::Matrix;
use crate::error::{Error, Result};

/// Default relative rank tolerance (against the largest column norm).
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// `A P = Q R` with Householder reflectors stored below the diagonal.
#[derive(Clone, Debug)]
pub struct ColPivQr {
    qr: Matrix,
    tau: Vec<f64>,
    /// `perm[k]` is the original column placed at position `k`.
    perm: Vec<usize>,
    rank: usize,
}

impl ColPivQr {
    pub fn factor(a: &Matrix, tol: f64) -> Self {
        let (m, n) = a.shape();
        let mut qr = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let steps = m.min(n);
        let mut tau = vec![0.0; steps];
        let mut norms: Vec<f64> = (0..n).map(|j| qr.column_norm(j).powi(2)).collect();
        let mut r11 = 0.0;
        let mut rank = 0;
        for k in 0..steps {
            // recompute trailing norms exactly; matrices here are small
            for j in k..n {
                norms[j] = (k..m).map(|i| qr[(i, j)].powi(2)).sum();
            }
            let (p, _) = (k..n).fold((k, -1.0), |best, j| {
                if norms[j] > best.1 {
                    (j, norms[j])
                } else {
                    best
                }
            });
            if p != k {
                for i in 0..m {
                    let t = qr[(i, k)];
                    qr[(i, k)] = qr[(i, p)];
                    qr[(i, p)] = t;
                }
                norms.swap(k, p);
                perm.swap(k, p);
            }
            let alpha_norm = norms[k].sqrt();
            if k == 0 {
                r11 = alpha_norm;
            }
            if alpha_norm == 0.0 || alpha_norm <= tol * r11 {
                break;
            }
            rank += 1;
            let x0 = qr[(k, k)];
            let alpha = if x0 >= 0.0 { -alpha_norm } else { alpha_norm };
            let v0 = x0 - alpha;
            // v = [1, x_{k+1..}/v0], tau = (alpha - x0)/alpha... stored LAPACK-style
            for i in k + 1..m {
                qr[(i, k)] /= v0;
            }
            let t = (alpha - x0) / alpha;
            tau[k] = t;
            qr[(k, k)] = alpha;
            for j in k + 1..n {
                let mut s = qr[(k, j)];
                for i in k + 1..m {
                    s += qr[(i, k)] * qr[(i, j)];
                }
                s *= t;
                qr[(k, j)] -= s;
                for i in k + 1..m {
                    let vik = qr[(i, k)];
                    qr[(i, j)] -= s * vik;
                }
            }
        }
        Self {
            qr,
            tau,
            perm,
            rank,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Original column indices (0-based) of the first `rank` pivots.
    pub fn pivots(&self) -> &[usize] {
        &self.perm[..self.rank]
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// `|R_kk|` for `k < rank`.
    pub fn r_diag(&self) -> Vec<f64> {
        (0..self.rank).map(|k| self.qr[(k, k)].abs()).collect()
    }

    /// Applies `Qᵀ` to `b` in place (all reflectors up to the rank).
    pub fn apply_qt(&self, b: &mut [f64]) {
        let m = self.qr.rows();
        for k in 0..self.rank {
            let mut s = b[k];
            for i in k + 1..m {
                s += self.qr[(i, k)] * b[i];
            }
            s *= self.tau[k];
            b[k] -= s;
            for i in k + 1..m {
                b[i] -= s * self.qr[(i, k)];
            }
        }
    }

    /// Applies `Q` to `b` in place.
    pub fn apply_q(&self, b: &mut [f64]) {
        let m = self.qr.rows();
        for k in (0..self.rank).rev() {
            let mut s = b[k];
            for i in k + 1..m {
                s += self.qr[(i, k)] * b[i];
            }
            s *= self.tau[k];
            b[k] -= s;
            for i in k + 1..m {
                b[i] -= s * self.qr[(i, k)];
            }
        }
    }

    /// Solves `R11 x = c` for the leading `rank x rank` triangle.
    pub fn solve_r11(&self, c: &[f64]) -> Vec<f64> {
        let r = self.rank;
        let mut x = c[..r].to_vec();
        for i in (0..r).rev() {
            let s: f64 = (i + 1..r).map(|j| self.qr[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / self.qr[(i, i)];
        }
        x
    }

    /// Solves `R11ᵀ x = c`.
    pub fn solve_r11_transpose(&self, c: &[f64]) -> Vec<f64> {
        let r = self.rank;
        let mut x = c[..r].to_vec();
        for i in 0..r {
            let s: f64 = (0..i).map(|j| self.qr[(j, i)] * x[j]).sum();
            x[i] = (x[i] - s) / self.qr[(i, i)];
        }
        x
    }

    /// Upper-trapezoidal `R` rows `0..rank`, columns in pivoted order.
    pub fn r_rows(&self) -> Matrix {
        let n = self.qr.cols();
        let mut r = Matrix::zeros(self.rank, n);
        for i in 0..self.rank {
            for j in i..n {
                r[(i, j)] = self.qr[(i, j)];
            }
        }
        r
    }

    /// Basic least-squares solution `x` minimizing `‖A x − b‖₂`, zero on
    /// non-pivot columns.
    pub fn least_squares(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.qr.rows() {
            return Err(Error::Dimension("right-hand side length".into()));
        }
        let mut c = b.to_vec();
        self.apply_qt(&mut c);
        let y = self.solve_r11(&c);
        let mut x = vec![0.0; self.qr.cols()];
        for (k, &col) in self.pivots().iter().enumerate() {
            x[col] = y[k];
        }
        Ok(x)
    }

    /// Component of `b` orthogonal to the numerical range of `A`.
    pub fn range_residual(&self, b: &[f64]) -> f64 {
        let mut c = b.to_vec();
        self.apply_qt(&mut c);
        norm2(&c[self.rank..])
    }
}

/// Numerical rank via column-pivoted QR: number of `|R_kk| > tol·|R_11|`.
pub fn rank_estimate(x: &Matrix, tol: f64) -> usize {
    ColPivQr::factor(x, tol).rank()
}
