use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::matrix::norm_inf;
use crate::linalg::Matrix;
use crate::solvers::{lp_feasibility, FeasibilityStatus, DEFAULT_SUPPORT_THRESHOLD};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualCheck {
    pub status: FeasibilityStatus,
    /// Fixed sign pattern on the support (1-based).
    pub signs: BTreeMap<usize, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
}

/// Existence of `β` with `‖Vᵀβ‖∞ ≤ 1` aligned with `sign(u)` on its support.
///
/// `Infeasible` means `u` cannot minimize `‖·‖₁` over `V x = V u`.
pub fn dual_certificate_check(v: &Matrix, u: &[f64]) -> Result<DualCheck> {
    dual_certificate_check_with(v, u, DEFAULT_SUPPORT_THRESHOLD)
}

pub fn dual_certificate_check_with(v: &Matrix, u: &[f64], threshold: f64) -> Result<DualCheck> {
    if u.len() != v.cols() {
        return Err(Error::Dimension(format!(
            "u has {} entries, V has {} columns",
            u.len(),
            v.cols()
        )));
    }
    let cut = threshold * norm_inf(u);
    let signs: BTreeMap<usize, f64> = u
        .iter()
        .enumerate()
        .filter(|(_, x)| x.abs() > cut && **x != 0.0)
        .map(|(i, x)| (i + 1, x.signum()))
        .collect();
    let verdict = lp_feasibility(v, &signs)?;
    Ok(DualCheck {
        status: verdict.status,
        signs,
        beta: verdict.beta,
    })
}

/// `V · diag(t)`.
pub fn sign_transform(v: &Matrix, t: &[f64]) -> Result<Matrix> {
    if t.len() != v.cols() {
        return Err(Error::Dimension(format!(
            "t has {} entries, V has {} columns",
            t.len(),
            v.cols()
        )));
    }
    if let Some(i) = t.iter().position(|&x| x == 0.0 || !x.is_finite()) {
        return Err(Error::ZeroScale(i + 1));
    }
    let mut out = v.clone();
    for i in 0..v.rows() {
        for (j, &tj) in t.iter().enumerate() {
            out[(i, j)] *= tj;
        }
    }
    Ok(out)
}

/// Largest `|cos|` between distinct columns.
pub fn column_coherence(v: &Matrix) -> Result<f64> {
    let norms: Vec<f64> = (0..v.cols()).map(|j| v.column_norm(j)).collect();
    if let Some(j) = norms.iter().position(|&x| x == 0.0) {
        return Err(Error::ZeroColumn(j + 1));
    }
    let cols: Vec<Vec<f64>> = (0..v.cols()).map(|j| v.column(j)).collect();
    let mut best = 0.0f64;
    for a in 0..cols.len() {
        for b in a + 1..cols.len() {
            let dot: f64 = cols[a].iter().zip(&cols[b]).map(|(x, y)| x * y).sum();
            best = best.max((dot / (norms[a] * norms[b])).abs().min(1.0));
        }
    }
    Ok(best)
}
