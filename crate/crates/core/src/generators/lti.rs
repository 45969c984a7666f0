use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Discrete-time single-input system `x(t+1) = A x(t) + b u(t)`, `y = c x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LtiSystem {
    pub a: Matrix,
    pub b: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
}

impl LtiSystem {
    pub fn new(a: Matrix, b: Vec<f64>, c: Option<Vec<f64>>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "A must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if b.len() != a.rows() {
            return Err(Error::Dimension(format!(
                "b has {} entries, A is {}x{}",
                b.len(),
                a.rows(),
                a.cols()
            )));
        }
        if let Some(c) = &c {
            if c.len() != a.rows() {
                return Err(Error::Dimension(format!("c has {} entries", c.len())));
            }
        }
        if b.iter().chain(c.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite entry in b or c".into()));
        }
        Ok(Self { a, b, c })
    }

    /// `A = diag(x)`, `b = 1`.
    pub fn diagonal(x: &[f64]) -> Result<Self> {
        Self::new(Matrix::diag(x), vec![1.0; x.len()], None)
    }

    /// Controllable canonical realization of `num(z)/den(z)`.
    ///
    /// `den` is given from the leading coefficient down and is normalized to
    /// be monic; `num` must have lower degree.
    pub fn from_transfer_function(num: &[f64], den: &[f64]) -> Result<Self> {
        let lead = *den
            .first()
            .ok_or_else(|| Error::InvalidInput("empty denominator".into()))?;
        if lead == 0.0 {
            return Err(Error::InvalidInput("leading denominator coefficient is zero".into()));
        }
        let n = den.len() - 1;
        if n == 0 {
            return Err(Error::InvalidInput("denominator must have degree >= 1".into()));
        }
        if num.len() > n {
            return Err(Error::InvalidInput("transfer function must be strictly proper".into()));
        }
        let mut a = Matrix::zeros(n, n);
        for i in 0..n - 1 {
            a[(i, i + 1)] = 1.0;
        }
        for j in 0..n {
            a[(n - 1, j)] = -den[n - j] / lead;
        }
        let mut b = vec![0.0; n];
        b[n - 1] = 1.0;
        // num = b_1 z^{k-1} + ... + b_k, c_j multiplies z^{j}
        let mut c = vec![0.0; n];
        for (p, &coef) in num.iter().rev().enumerate() {
            c[p] = coef / lead;
        }
        Self::new(a, b, Some(c))
    }

    pub fn order(&self) -> usize {
        self.b.len()
    }

    /// `g(t) = c A^{t−1} b` for `t = 1..=len`.
    pub fn impulse_response(&self, len: usize) -> Result<Vec<f64>> {
        let c = self
            .c
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("system has no output vector c".into()))?;
        let mut x = self.b.clone();
        let mut g = Vec::with_capacity(len);
        for _ in 0..len {
            g.push(c.iter().zip(&x).map(|(a, b)| a * b).sum());
            x = self.a.mul_vec(&x);
        }
        Ok(g)
    }
}

/// Extended controllability matrix `[b, Ab, …, A^{N−1}b]`.
pub fn ctrb(sys: &LtiSystem, n: usize) -> Result<Matrix> {
    if n == 0 {
        return Err(Error::InvalidInput("horizon N must be >= 1".into()));
    }
    let mut cols = Vec::with_capacity(n);
    let mut x = sys.b.clone();
    for _ in 0..n {
        let next = sys.a.mul_vec(&x);
        cols.push(std::mem::replace(&mut x, next));
    }
    Matrix::from_columns(&cols)
}

/// Extended observability matrix with rows `c, cA, …, cA^{M−1}`.
pub fn obsv(sys: &LtiSystem, m: usize) -> Result<Matrix> {
    let c = sys
        .c
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("system has no output vector c".into()))?;
    if m == 0 {
        return Err(Error::InvalidInput("M must be >= 1".into()));
    }
    let mut rows = Vec::with_capacity(m);
    let mut r = c.clone();
    for _ in 0..m {
        let next = sys.a.tr_mul_vec(&r);
        rows.push(std::mem::replace(&mut r, next));
    }
    Matrix::from_rows(&rows)
}

/// Hankel matrix `H_{M,N}` with entry `(i, j) = g(i + j − 1)`.
pub fn hankel(sys: &LtiSystem, m: usize, n: usize) -> Result<Matrix> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidInput("M and N must be >= 1".into()));
    }
    let g = sys.impulse_response(m + n - 1)?;
    let mut h = Matrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            h[(i, j)] = g[i + j];
        }
    }
    Ok(h)
}

/// Page matrix: columns are disjoint consecutive blocks of length `M`.
pub fn page_matrix(g: &[f64], m: usize) -> Result<Matrix> {
    if m == 0 {
        return Err(Error::InvalidInput("M must be >= 1".into()));
    }
    let cols = g.len() / m;
    if cols == 0 {
        return Err(Error::InsufficientData(format!(
            "{} samples cannot fill a column of length {m}",
            g.len()
        )));
    }
    let blocks: Vec<Vec<f64>> = g.chunks_exact(m).map(<[f64]>::to_vec).collect();
    Matrix::from_columns(&blocks)
}
