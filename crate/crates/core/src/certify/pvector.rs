use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::matrix::norm1;
use crate::linalg::{rank_estimate, LeadingBlock, Matrix, DEFAULT_RANK_TOL};

/// Relative residual above which a column is outside the leading block's span.
pub const IMAGE_RESIDUAL_TOL: f64 = 1e-8;

/// `p_k = ‖V[:,1:r]⁺ V[:,k]‖₁` for every column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PVector {
    pub r: usize,
    pub values: Vec<f64>,
    pub image_condition_ok: bool,
    pub max_residual: f64,
}

impl PVector {
    /// 1-based access.
    pub fn get(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.values.get(i)).copied()
    }
}

/// Lazy evaluator of `p_k` against one cached factorization.
#[derive(Debug)]
pub struct PEvaluator {
    block: LeadingBlock,
    probes: Cell<usize>,
}

impl PEvaluator {
    /// Factors the leading rank-`r` block, `r = rank(V)`.
    pub fn new(v: &Matrix) -> Result<Self> {
        let (m, n) = v.shape();
        if m == 0 || n < m {
            return Err(Error::Dimension(format!("need n >= m >= 1, got {m}x{n}")));
        }
        let r = rank_estimate(v, DEFAULT_RANK_TOL);
        if r == 0 {
            return Err(Error::ImageCondition("matrix has rank 0".into()));
        }
        Ok(Self {
            block: LeadingBlock::new(v, r)?,
            probes: Cell::new(0),
        })
    }

    pub fn r(&self) -> usize {
        self.block.r()
    }

    pub fn n(&self) -> usize {
        self.block.matrix().cols()
    }

    pub fn matrix(&self) -> &Matrix {
        self.block.matrix()
    }

    pub fn probes(&self) -> usize {
        self.probes.get()
    }

    pub fn coeffs(&self, k: usize) -> Result<Vec<f64>> {
        self.block.coeffs(k)
    }

    pub fn p(&self, k: usize) -> Result<f64> {
        self.probes.set(self.probes.get() + 1);
        Ok(norm1(&self.block.coeffs(k)?))
    }

    /// Full scan with the image-condition residual check.
    pub fn scan(&self) -> Result<PVector> {
        let n = self.n();
        let mut values = Vec::with_capacity(n);
        let mut max_residual = 0.0f64;
        for k in 1..=n {
            let c = self.block.coeffs(k)?;
            if k > self.r() {
                max_residual = max_residual.max(self.block.relative_residual(k, &c));
            }
            values.push(norm1(&c));
        }
        self.probes.set(self.probes.get() + n);
        Ok(PVector {
            r: self.r(),
            values,
            image_condition_ok: max_residual <= IMAGE_RESIDUAL_TOL,
            max_residual,
        })
    }
}

/// The p-vector of `V`.
///
/// A rank-deficient leading block yields a vector with
/// `image_condition_ok = false` and no values.
pub fn p_vector(v: &Matrix) -> Result<PVector> {
    match PEvaluator::new(v) {
        Ok(ev) => ev.scan(),
        Err(Error::ImageCondition(_)) => Ok(PVector {
            r: rank_estimate(v, DEFAULT_RANK_TOL),
            values: Vec::new(),
            image_condition_ok: false,
            max_residual: f64::INFINITY,
        }),
        Err(e) => Err(e),
    }
}
