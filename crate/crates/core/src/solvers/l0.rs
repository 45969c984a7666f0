//! Exhaustive minimum-cardinality oracle.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::bp::{SolveStatus, SolverKind, SparseSolution, DEFAULT_SUPPORT_THRESHOLD};
use crate::error::{Error, Result};
use crate::linalg::matrix::norm2;
use crate::linalg::{binomial, ColPivQr, Matrix, DEFAULT_RANK_TOL};

pub const DEFAULT_L0_BUDGET: u128 = 10_000_000;
pub const DEFAULT_RES_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct L0Report {
    pub min_cardinality: Option<usize>,
    /// Every support of minimal size that reproduces `y`, in lexicographic order.
    pub solutions_found: Vec<SparseSolution>,
    pub exhaustive: bool,
    pub search_bound: usize,
    pub supports_tested: u128,
}

impl L0Report {
    pub fn count(&self) -> usize {
        self.solutions_found.len()
    }
}

/// Smallest `s ≤ max_card` with some `|S| = s` and `‖V_S u_S − y‖ ≤ res_tol·‖y‖`.
pub fn solve_l0(v: &Matrix, y: &[f64], max_card: usize, res_tol: f64) -> Result<L0Report> {
    solve_l0_with_budget(v, y, max_card, res_tol, DEFAULT_L0_BUDGET)
}

pub fn solve_l0_with_budget(
    v: &Matrix,
    y: &[f64],
    max_card: usize,
    res_tol: f64,
    budget: u128,
) -> Result<L0Report> {
    let (m, n) = v.shape();
    if y.len() != m {
        return Err(Error::Dimension(format!("y has {} entries, V has {m} rows", y.len())));
    }
    let bound = max_card.min(n);
    let ny = norm2(y);
    let mut report = L0Report {
        min_cardinality: None,
        solutions_found: Vec::new(),
        exhaustive: true,
        search_bound: bound,
        supports_tested: 0,
    };
    if ny == 0.0 {
        report.min_cardinality = Some(0);
        report.solutions_found.push(SparseSolution::new(
            vec![0.0; n],
            SolveStatus::Optimal,
            SolverKind::L0Oracle,
            0.0,
            DEFAULT_SUPPORT_THRESHOLD,
        ));
        report.supports_tested = 1;
        return Ok(report);
    }
    for s in 1..=bound {
        if report.supports_tested + binomial(n, s) > budget {
            report.exhaustive = false;
            return Ok(report);
        }
        for cols in (0..n).combinations(s) {
            report.supports_tested += 1;
            if let Some(sol) = try_support(v, y, &cols, res_tol * ny) {
                report.solutions_found.push(sol);
            }
        }
        if !report.solutions_found.is_empty() {
            report.min_cardinality = Some(s);
            return Ok(report);
        }
    }
    Ok(report)
}

fn try_support(v: &Matrix, y: &[f64], cols: &[usize], tol: f64) -> Option<SparseSolution> {
    let rows: Vec<usize> = (0..v.rows()).collect();
    let sub = v.select(&rows, cols);
    let qr = ColPivQr::factor(&sub, DEFAULT_RANK_TOL);
    if qr.rank() < cols.len() || qr.range_residual(y) > tol {
        return None;
    }
    let x = qr.least_squares(y).ok()?;
    let big = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if x.iter().any(|v| v.abs() <= DEFAULT_SUPPORT_THRESHOLD * big) {
        return None;
    }
    let mut u = vec![0.0; v.cols()];
    for (&j, &val) in cols.iter().zip(&x) {
        u[j] = val;
    }
    let vu = v.mul_vec(&u);
    let res = norm2(&vu.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<_>>());
    if res > tol {
        return None;
    }
    Some(SparseSolution::new(
        u,
        SolveStatus::Optimal,
        SolverKind::L0Oracle,
        res,
        DEFAULT_SUPPORT_THRESHOLD,
    ))
}
