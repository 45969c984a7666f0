//! Solves against the leading column block `V[:, 1:r]`.

use super::lu::Lu;
use super::matrix::norm2;
use super::qr::{ColPivQr, DEFAULT_RANK_TOL};
use super::Matrix;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
enum Factor {
    Lu(Lu),
    Qr(ColPivQr),
}

/// Factorization of `V[:, 1:r]` reused across many right-hand sides.
#[derive(Clone, Debug)]
pub struct LeadingBlock {
    v: Matrix,
    r: usize,
    factor: Factor,
}

impl LeadingBlock {
    /// Factors the first `r` columns of `v`; fails with an image-condition
    /// error when their numerical rank is below `r`.
    pub fn new(v: &Matrix, r: usize) -> Result<Self> {
        if r == 0 || r > v.cols() || r > v.rows() {
            return Err(Error::ImageCondition(format!(
                "leading block of {r} columns does not fit a {}x{} matrix",
                v.rows(),
                v.cols()
            )));
        }
        let block = v.leading_columns(r);
        let qr = ColPivQr::factor(&block, DEFAULT_RANK_TOL);
        if qr.rank() < r {
            return Err(Error::ImageCondition(format!(
                "leading {r} columns have numerical rank {}",
                qr.rank()
            )));
        }
        let factor = if block.is_square() {
            Factor::Lu(Lu::factor(&block)?)
        } else {
            Factor::Qr(qr)
        };
        Ok(Self {
            v: v.clone(),
            r,
            factor,
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn matrix(&self) -> &Matrix {
        &self.v
    }

    /// Coefficients `c` with `V[:, 1:r] c ≈ v`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        match &self.factor {
            Factor::Lu(lu) => lu.solve(rhs),
            Factor::Qr(qr) => qr.least_squares(rhs),
        }
    }

    /// Coefficients for column `j` (1-based); exact unit vectors for `j ≤ r`.
    pub fn coeffs(&self, j: usize) -> Result<Vec<f64>> {
        if j == 0 || j > self.v.cols() {
            return Err(Error::IndexOutOfBounds {
                index: j,
                bound: self.v.cols(),
            });
        }
        if j <= self.r {
            let mut e = vec![0.0; self.r];
            e[j - 1] = 1.0;
            return Ok(e);
        }
        self.solve(&self.v.column(j - 1))
    }

    /// `‖V[:,1:r] c − V[:,j]‖₂ / ‖V[:,j]‖₂` for the computed coefficients.
    pub fn relative_residual(&self, j: usize, c: &[f64]) -> f64 {
        let col = self.v.column(j - 1);
        let mut res = col.clone();
        for (k, &ck) in c.iter().enumerate() {
            for (i, r) in res.iter_mut().enumerate() {
                *r -= self.v[(i, k)] * ck;
            }
        }
        let denom = norm2(&col);
        if denom == 0.0 {
            norm2(&res)
        } else {
            norm2(&res) / denom
        }
    }
}

/// Coefficient vector expressing column `j` in the first `r` columns.
pub fn leading_block_coeffs(v: &Matrix, r: usize, j: usize) -> Result<Vec<f64>> {
    LeadingBlock::new(v, r)?.coeffs(j)
}
