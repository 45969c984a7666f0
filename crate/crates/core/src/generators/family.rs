use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{binomial, consecutive_minors_upto, forward_difference, IndexTuple, Matrix};
use crate::structure::{classify, Property, Route, StructureReport, Witness};

type CustomFn = Arc<dyn Fn(usize, usize, f64) -> f64 + Send + Sync>;

/// Finite family of functions `f_1, …, f_n` with derivative evaluators.
#[derive(Clone)]
pub enum FunctionFamily {
    /// `f_j(t) = t^{j−1}`, `j = 1..=n`.
    Monomial { n: usize },
    /// `f_j(t) = exp(λ_j t)`.
    Exponential { lambdas: Vec<f64> },
    /// Bernstein basis of degree `d` on `[0, 1]`, `n = d + 1` functions.
    Bernstein { degree: usize },
    /// `eval(j, k, t)` returns `f_j^{(k)}(t)` for 1-based `j`.
    Custom {
        name: String,
        n: usize,
        max_derivative: usize,
        eval: CustomFn,
    },
}

impl fmt::Debug for FunctionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Monomial { n } => write!(f, "Monomial {{ n: {n} }}"),
            Self::Exponential { lambdas } => write!(f, "Exponential {{ lambdas: {lambdas:?} }}"),
            Self::Bernstein { degree } => write!(f, "Bernstein {{ degree: {degree} }}"),
            Self::Custom { name, n, .. } => write!(f, "Custom {{ name: {name:?}, n: {n} }}"),
        }
    }
}

impl FunctionFamily {
    pub fn custom(
        name: impl Into<String>,
        n: usize,
        max_derivative: usize,
        eval: impl Fn(usize, usize, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::Custom {
            name: name.into(),
            n,
            max_derivative,
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Self::Monomial { .. } => "monomial",
            Self::Exponential { .. } => "exponential",
            Self::Bernstein { .. } => "bernstein",
            Self::Custom { name, .. } => name,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Monomial { n } | Self::Custom { n, .. } => *n,
            Self::Exponential { lambdas } => lambdas.len(),
            Self::Bernstein { degree } => degree + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_derivative(&self) -> Option<usize> {
        match self {
            Self::Custom { max_derivative, .. } => Some(*max_derivative),
            _ => None,
        }
    }

    pub fn value(&self, j: usize, t: f64) -> Result<f64> {
        self.derivative(j, 0, t)
    }

    /// `f_j^{(k)}(t)` for 1-based `j`.
    pub fn derivative(&self, j: usize, k: usize, t: f64) -> Result<f64> {
        let n = self.len();
        if j == 0 || j > n {
            return Err(Error::IndexOutOfBounds { index: j, bound: n });
        }
        match self {
            Self::Monomial { .. } => {
                let p = j - 1;
                if k > p {
                    return Ok(0.0);
                }
                let falling: f64 = (p - k + 1..=p).map(|v| v as f64).product();
                Ok(falling * t.powi((p - k) as i32))
            }
            Self::Exponential { lambdas } => {
                let l = lambdas[j - 1];
                Ok(l.powi(k as i32) * (l * t).exp())
            }
            Self::Bernstein { degree } => {
                if !(0.0..=1.0).contains(&t) {
                    return Err(Error::PointOutOfDomain(t));
                }
                Ok(bernstein_derivative(*degree, j - 1, k, t))
            }
            Self::Custom {
                max_derivative,
                eval,
                ..
            } => {
                if k > *max_derivative {
                    return Err(Error::DerivativeUnsupported(k));
                }
                Ok(eval(j, k, t))
            }
        }
    }
}

/// `C(d, i) t^i (1−t)^{d−i}`, zero outside `0..=d`.
fn bernstein_basis(d: usize, i: isize, t: f64) -> f64 {
    if i < 0 || i as usize > d {
        return 0.0;
    }
    let i = i as usize;
    binomial(d, i) as f64 * t.powi(i as i32) * (1.0 - t).powi((d - i) as i32)
}

/// `k`-th derivative of the `i`-th (0-based) Bernstein polynomial of degree `d`.
fn bernstein_derivative(d: usize, i: usize, k: usize, t: f64) -> f64 {
    if k > d {
        return 0.0;
    }
    let lead: f64 = (d - k + 1..=d).map(|v| v as f64).product();
    let sum: f64 = (0..=k)
        .map(|l| {
            let sign = if (k - l).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * binomial(k, l) as f64 * bernstein_basis(d - k, i as isize - l as isize, t)
        })
        .sum();
    lead * sum
}

/// Samples the degree-`d` Bernstein basis: entry `(i, j) = B_{j−1,d}(t_i)`.
pub fn bernstein_sample(degree: usize, points: &[f64]) -> Result<Matrix> {
    let mut out = Matrix::zeros(points.len(), degree + 1);
    for (i, &t) in points.iter().enumerate() {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::PointOutOfDomain(t));
        }
        for j in 0..=degree {
            out[(i, j)] = bernstein_basis(degree, j as isize, t);
        }
    }
    Ok(out)
}

/// `n×m` matrix with entry `(j, k) = f_j^{(k−1)}(t)`.
pub fn confluent_matrix(family: &FunctionFamily, t: f64, m: usize) -> Result<Matrix> {
    if m == 0 {
        return Err(Error::InvalidInput("m must be >= 1".into()));
    }
    if let Some(max) = family.max_derivative() {
        if m - 1 > max {
            return Err(Error::DerivativeUnsupported(m - 1));
        }
    }
    let n = family.len();
    let mut out = Matrix::zeros(n, m);
    for j in 0..n {
        for k in 0..m {
            out[(j, k)] = family.derivative(j + 1, k, t)?;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyVariant {
    /// The functions themselves.
    Plain,
    /// Differences `f_{j+1} − f_j` of successive functions.
    Delta,
}

/// Grid check of the sign conditions on confluent matrices.
///
/// At every grid point the consecutive `k`-minors of the first `k` columns
/// (`k < m`) must share one strict sign per `k`, and the consecutive
/// `m`-minors one (strict) sign, each sign fixed across the whole grid.
/// This is a necessary check on finitely many points, not a proof over an
/// interval.
pub fn check_family_conditions(
    family: &FunctionFamily,
    m: usize,
    grid: &[f64],
    variant: FamilyVariant,
    strict: bool,
) -> Result<StructureReport> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("grid must be nonempty".into()));
    }
    let property = if strict { Property::SSC } else { Property::SC };
    let mut rep = StructureReport::new(property, m, Route::ConsecutiveMinors);
    let mut signs = vec![0i8; m];
    for &t in grid {
        let x = confluent_matrix(family, t, m)?;
        let x = match variant {
            FamilyVariant::Plain => x,
            FamilyVariant::Delta => forward_difference(&x)?,
        };
        if x.rows() < m {
            return Err(Error::Dimension(format!(
                "family yields {} rows, need at least {m}",
                x.rows()
            )));
        }
        let levels = consecutive_minors_upto(&x, m)?;
        for (k, seq) in levels.iter().enumerate() {
            let last = k + 1 == m;
            rep.stats.lu_fallbacks += seq.fallbacks;
            for i in (0..seq.len()).filter(|&i| seq.col_offsets[i] == 1) {
                rep.stats.minors_evaluated += 1;
                let s = classify(seq.values[i], seq.scales[i]);
                let (rows, cols) = seq.window(i);
                let w = Witness {
                    rows,
                    cols,
                    value: seq.values[i],
                };
                if s == 0 {
                    if strict || !last {
                        rep.witnesses = vec![w];
                        rep.note = Some(format!("dead-zone minor of order {} at t = {t}", k + 1));
                        return Ok(rep);
                    }
                    continue;
                }
                if signs[k] == 0 {
                    signs[k] = s;
                    rep.witnesses.push(w);
                } else if signs[k] != s {
                    let first = rep.witnesses.iter().find(|x| x.rows.len() == k + 1).cloned();
                    rep.witnesses = first.into_iter().chain(std::iter::once(w)).collect();
                    rep.note = Some(format!("mixed signs for order {} at t = {t}", k + 1));
                    return Ok(rep);
                }
            }
        }
    }
    rep.holds = true;
    rep.shared_sign = signs[m - 1];
    rep.witnesses.clear();
    rep.note = Some(format!("necessary check on {} grid points", grid.len()));
    Ok(rep)
}

/// Convenience for tests and the CLI: indices of a window as tuples.
pub fn window_tuples(row0: usize, col0: usize, k: usize, rows: usize, cols: usize) -> Result<(IndexTuple, IndexTuple)> {
    Ok((
        IndexTuple::consecutive(row0, k, rows)?,
        IndexTuple::consecutive(col0, k, cols)?,
    ))
}
