//! Minors, multiplicative compounds and consecutive-minor sweeps.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::lu::det;
use super::Matrix;
use crate::error::{Error, Result};

/// Default cap on the number of entries of a compound matrix.
pub const COMPOUND_CAP: u128 = 1_000_000;

/// Interior condensation pivots below this fraction of `max |entry|` force
/// the LU path.
pub const DODGSON_PIVOT_TOL: f64 = 1e-12;

/// Strictly increasing tuple of 1-based indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexTuple(Vec<usize>);

impl IndexTuple {
    pub fn new(values: Vec<usize>, bound: usize) -> Result<Self> {
        for &v in &values {
            if v == 0 || v > bound {
                return Err(Error::IndexOutOfBounds { index: v, bound });
            }
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NotIncreasing(values));
        }
        Ok(Self(values))
    }

    /// `(start, start+1, …, start+len−1)`.
    pub fn consecutive(start: usize, len: usize, bound: usize) -> Result<Self> {
        Self::new((start..start + len).collect(), bound)
    }

    pub(crate) fn from_zero_based(v: &[usize]) -> Self {
        Self(v.iter().map(|i| i + 1).collect())
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn zero_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i - 1).collect()
    }
}

/// Determinant of `X[rows, cols]` by LU with partial pivoting.
pub fn minor(x: &Matrix, rows: &IndexTuple, cols: &IndexTuple) -> Result<f64> {
    if rows.len() != cols.len() {
        return Err(Error::Dimension(format!(
            "row tuple has {} entries, column tuple {}",
            rows.len(),
            cols.len()
        )));
    }
    if rows.len() > x.rows().min(x.cols()) {
        return Err(Error::Dimension("minor order exceeds matrix size".into()));
    }
    check_bound(rows, x.rows())?;
    check_bound(cols, x.cols())?;
    det(&x.select(&rows.zero_based(), &cols.zero_based()))
}

fn check_bound(t: &IndexTuple, bound: usize) -> Result<()> {
    match t.values().iter().find(|&&v| v > bound) {
        Some(&v) => Err(Error::IndexOutOfBounds { index: v, bound }),
        None => Ok(()),
    }
}

/// `C(n, k)` without overflow for the sizes used here.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `r`-th multiplicative compound with lexicographic tuple ordering.
pub fn compound(x: &Matrix, r: usize) -> Result<Matrix> {
    compound_with_cap(x, r, COMPOUND_CAP)
}

pub fn compound_with_cap(x: &Matrix, r: usize, cap: u128) -> Result<Matrix> {
    let max = x.rows().min(x.cols());
    if r == 0 || r > max {
        return Err(Error::OrderOutOfRange { order: r, min: 1, max });
    }
    let entries = binomial(x.rows(), r) * binomial(x.cols(), r);
    if entries > cap {
        return Err(Error::CompoundTooLarge { entries, cap });
    }
    let row_sets: Vec<Vec<usize>> = (0..x.rows()).combinations(r).collect();
    let col_sets: Vec<Vec<usize>> = (0..x.cols()).combinations(r).collect();
    let mut out = Matrix::zeros(row_sets.len(), col_sets.len());
    for (a, rs) in row_sets.iter().enumerate() {
        for (b, cs) in col_sets.iter().enumerate() {
            out[(a, b)] = det(&x.select(rs, cs))?;
        }
    }
    Ok(out)
}

/// Lexicographic `r`-tuples (1-based) of `1..=n`, in compound ordering.
pub fn lex_tuples(n: usize, r: usize) -> Vec<IndexTuple> {
    (0..n)
        .combinations(r)
        .map(|c| IndexTuple::from_zero_based(&c))
        .collect()
}

/// `min(Π row norms, Π column norms)` of `X[rows, cols]` (0-based lists).
///
/// Upper bound for the absolute value of the minor; used as the scale of
/// sign dead zones.
pub fn hadamard_scale(x: &Matrix, rows: &[usize], cols: &[usize]) -> f64 {
    let rp: f64 = rows
        .iter()
        .map(|&i| cols.iter().map(|&j| x[(i, j)].powi(2)).sum::<f64>().sqrt())
        .product();
    let cp: f64 = cols
        .iter()
        .map(|&j| rows.iter().map(|&i| x[(i, j)].powi(2)).sum::<f64>().sqrt())
        .product();
    rp.min(cp)
}

/// All consecutive `order`-minors of a matrix in row-major sweep order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinorSequence {
    pub order: usize,
    pub values: Vec<f64>,
    /// 1-based first row of each window.
    pub row_offsets: Vec<usize>,
    /// 1-based first column of each window.
    pub col_offsets: Vec<usize>,
    /// Hadamard scale of each window.
    pub scales: Vec<f64>,
    /// Number of windows recomputed by LU.
    pub fallbacks: usize,
}

impl MinorSequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn window(&self, idx: usize) -> (IndexTuple, IndexTuple) {
        let r0 = self.row_offsets[idx];
        let c0 = self.col_offsets[idx];
        (
            IndexTuple((r0..r0 + self.order).collect()),
            IndexTuple((c0..c0 + self.order).collect()),
        )
    }
}

/// Consecutive `j`-minors by Dodgson condensation with LU fallback.
pub fn consecutive_minors(x: &Matrix, j: usize) -> Result<MinorSequence> {
    Ok(consecutive_minors_upto(x, j)?.pop().expect("at least one level"))
}

/// Levels `1..=j` of the condensation sweep; entry `s−1` holds the
/// consecutive `s`-minors.
pub fn consecutive_minors_upto(x: &Matrix, j: usize) -> Result<Vec<MinorSequence>> {
    let max = x.rows().min(x.cols());
    if j == 0 || j > max {
        return Err(Error::OrderOutOfRange { order: j, min: 1, max });
    }
    let (m, n) = x.shape();
    let sq = SquarePrefix::new(x);
    let pivot_floor = DODGSON_PIVOT_TOL * x.max_abs();
    let eps = f64::EPSILON;

    // level k holds an (m-k+1) x (n-k+1) grid of k-minors and error estimates
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None; // level k-1
    let mut cur: Vec<f64> = x.as_slice().to_vec();
    let mut cur_err: Vec<f64> = cur.iter().map(|v| v.abs() * eps).collect();
    let mut levels = Vec::with_capacity(j);
    levels.push(sequence_from_grid(1, m, n, &cur, &sq, 0));

    for k in 1..j {
        let (cr, cc) = (m - k + 1, n - k + 1);
        let (nr, nc) = (cr - 1, cc - 1);
        let mut next = vec![0.0; nr * nc];
        let mut next_err = vec![0.0; nr * nc];
        let mut fallbacks = 0;
        for r in 0..nr {
            for c in 0..nc {
                let a = cur[r * cc + c];
                let b = cur[r * cc + c + 1];
                let cv = cur[(r + 1) * cc + c];
                let d = cur[(r + 1) * cc + c + 1];
                let (ea, eb, ec, ed) = (
                    cur_err[r * cc + c],
                    cur_err[r * cc + c + 1],
                    cur_err[(r + 1) * cc + c],
                    cur_err[(r + 1) * cc + c + 1],
                );
                let num = a * d - b * cv;
                let num_err = (a * d).abs().max((b * cv).abs()) * 2.0 * eps
                    + a.abs() * ed
                    + d.abs() * ea
                    + b.abs() * ec
                    + cv.abs() * eb;
                let (p, ep) = match &prev {
                    None => (1.0, 0.0),
                    Some((pv, pe)) => {
                        let pc = cc + 1;
                        (pv[(r + 1) * pc + c + 1], pe[(r + 1) * pc + c + 1])
                    }
                };
                let scale = sq.hadamard(r, c, k + 1);
                let mut value = f64::NAN;
                let mut err = f64::INFINITY;
                if p.abs() > pivot_floor.max(f64::MIN_POSITIVE) {
                    value = num / p;
                    err = num_err / p.abs() + value.abs() * (ep / p.abs() + eps);
                }
                let budget = 1e-11 * value.abs() + 1e-13 * scale;
                if !value.is_finite() || !(err <= budget) {
                    let rows: Vec<usize> = (r..r + k + 1).collect();
                    let cols: Vec<usize> = (c..c + k + 1).collect();
                    value = det(&x.select(&rows, &cols))?;
                    err = (k + 1) as f64 * 4.0 * eps * scale;
                    fallbacks += 1;
                }
                next[r * nc + c] = value;
                next_err[r * nc + c] = err;
            }
        }
        levels.push(sequence_from_grid(k + 1, nr, nc, &next, &sq, fallbacks));
        prev = Some((cur, cur_err));
        cur = next;
        cur_err = next_err;
    }
    Ok(levels)
}

fn sequence_from_grid(
    order: usize,
    gr: usize,
    gc: usize,
    grid: &[f64],
    sq: &SquarePrefix,
    fallbacks: usize,
) -> MinorSequence {
    let mut row_offsets = Vec::with_capacity(gr * gc);
    let mut col_offsets = Vec::with_capacity(gr * gc);
    let mut scales = Vec::with_capacity(gr * gc);
    for r in 0..gr {
        for c in 0..gc {
            row_offsets.push(r + 1);
            col_offsets.push(c + 1);
            scales.push(sq.hadamard(r, c, order));
        }
    }
    MinorSequence {
        order,
        values: grid.to_vec(),
        row_offsets,
        col_offsets,
        scales,
        fallbacks,
    }
}

/// Prefix sums of squared entries along rows and along columns, giving
/// window row and column norms in O(1).
struct SquarePrefix {
    n: usize,
    m: usize,
    row_pre: Vec<f64>, // m x (n+1)
    col_pre: Vec<f64>, // n x (m+1)
}

impl SquarePrefix {
    fn new(x: &Matrix) -> Self {
        let (m, n) = x.shape();
        let mut row_pre = vec![0.0; m * (n + 1)];
        for i in 0..m {
            for j in 0..n {
                row_pre[i * (n + 1) + j + 1] = row_pre[i * (n + 1) + j] + x[(i, j)].powi(2);
            }
        }
        let mut col_pre = vec![0.0; n * (m + 1)];
        for j in 0..n {
            for i in 0..m {
                col_pre[j * (m + 1) + i + 1] = col_pre[j * (m + 1) + i] + x[(i, j)].powi(2);
            }
        }
        Self {
            n,
            m,
            row_pre,
            col_pre,
        }
    }

    fn hadamard(&self, r0: usize, c0: usize, k: usize) -> f64 {
        let w = self.n + 1;
        let rp: f64 = (r0..r0 + k)
            .map(|i| (self.row_pre[i * w + c0 + k] - self.row_pre[i * w + c0]).max(0.0).sqrt())
            .product();
        let h = self.m + 1;
        let cp: f64 = (c0..c0 + k)
            .map(|j| (self.col_pre[j * h + r0 + k] - self.col_pre[j * h + r0]).max(0.0).sqrt())
            .product();
        rp.min(cp)
    }
}

/// Number of strict sign changes after deleting zeros; `−1` for zero.
pub fn variation(u: &[f64]) -> i64 {
    let mut last = 0.0f64;
    let mut changes = 0i64;
    let mut seen = false;
    for &v in u.iter().filter(|v| **v != 0.0) {
        if seen && (v > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = v;
        seen = true;
    }
    if seen {
        changes
    } else {
        -1
    }
}

/// Row forward difference: row `i` of the result is `row(i+1) − row(i)`.
pub fn forward_difference(x: &Matrix) -> Result<Matrix> {
    if x.rows() < 2 {
        return Err(Error::Dimension("forward difference needs at least two rows".into()));
    }
    let mut out = Matrix::zeros(x.rows() - 1, x.cols());
    for i in 0..x.rows() - 1 {
        for j in 0..x.cols() {
            out[(i, j)] = x[(i + 1, j)] - x[(i, j)];
        }
    }
    Ok(out)
}

/// Anti-diagonal `K_m` with entry `(i, m+1−i) = (−1)^{m−i}` (1-based).
pub fn antidiag_k(m: usize) -> Matrix {
    let mut k = Matrix::zeros(m, m);
    for i in 0..m {
        // 0-based row i is 1-based i+1; exponent m-(i+1)
        k[(i, m - 1 - i)] = if (m - 1 - i).is_multiple_of(2) { 1.0 } else { -1.0 };
    }
    k
}
