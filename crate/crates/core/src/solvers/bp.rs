//! Basis pursuit and dual feasibility LPs.
//!
//! Both problems are posed in reduced coordinates: with `V P = Q R` and
//! numerical rank `r`, the constraint `V u = y` becomes `G u = ỹ` where
//! `G = R11⁻¹ [R11 R12] Pᵀ` carries an exact identity on the pivot columns
//! and `ỹ = R11⁻¹ Q_rᵀ y`. Dual vectors map back through
//! `β = Q_r R11⁻ᵀ β̃`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::simplex::{solve_standard_form, LpStatus, SimplexOptions};
use crate::error::{Error, Result};
use crate::linalg::matrix::{norm1, norm2, norm_inf};
use crate::linalg::{ColPivQr, Matrix, DEFAULT_RANK_TOL};

pub const DEFAULT_FEAS_TOL: f64 = 1e-8;
pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 1e-6;
pub const DUALITY_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericFailure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    BpLp,
    L0Oracle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseSolution {
    pub u: Vec<f64>,
    /// 1-based indices with `|u_i| > threshold · ‖u‖∞`.
    pub support: Vec<usize>,
    pub objective: f64,
    pub status: SolveStatus,
    pub solver: SolverKind,
    pub residual: f64,
    pub threshold: f64,
}

impl SparseSolution {
    pub(crate) fn new(u: Vec<f64>, status: SolveStatus, solver: SolverKind, residual: f64, threshold: f64) -> Self {
        let support = support_of(&u, threshold);
        let objective = norm1(&u);
        Self {
            u,
            support,
            objective,
            status,
            solver,
            residual,
            threshold,
        }
    }

    pub(crate) fn failed(n: usize, status: SolveStatus, solver: SolverKind, threshold: f64) -> Self {
        Self {
            u: vec![0.0; n],
            support: Vec::new(),
            objective: f64::NAN,
            status,
            solver,
            residual: f64::NAN,
            threshold,
        }
    }
}

/// 1-based indices above `threshold` relative to the largest magnitude.
pub fn support_of(u: &[f64], threshold: f64) -> Vec<usize> {
    let cut = threshold * norm_inf(u);
    u.iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > cut && **v != 0.0)
        .map(|(i, _)| i + 1)
        .collect()
}

#[derive(Clone, Debug)]
pub struct BpOptions {
    pub feas_tol: f64,
    pub threshold: f64,
    pub simplex: SimplexOptions,
}

impl Default for BpOptions {
    fn default() -> Self {
        Self {
            feas_tol: DEFAULT_FEAS_TOL,
            threshold: DEFAULT_SUPPORT_THRESHOLD,
            simplex: SimplexOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualSolution {
    pub beta: Vec<f64>,
    pub objective: f64,
    pub status: SolveStatus,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BpResult {
    pub solution: SparseSolution,
    pub dual: DualSolution,
    pub duality_gap: f64,
    pub iterations: usize,
}

struct Reduced {
    qr: ColPivQr,
    /// `r × n`, original column order.
    g: Matrix,
}

impl Reduced {
    fn new(v: &Matrix) -> Self {
        let qr = ColPivQr::factor(v, DEFAULT_RANK_TOL);
        let r = qr.rank();
        let n = v.cols();
        let rr = qr.r_rows();
        let perm = qr.permutation();
        let mut g = Matrix::zeros(r, n);
        for k in 0..n {
            let col = if k < r {
                let mut e = vec![0.0; r];
                e[k] = 1.0;
                e
            } else {
                qr.solve_r11(&rr.column(k))
            };
            for i in 0..r {
                g[(i, perm[k])] = col[i];
            }
        }
        Self { qr, g }
    }

    fn rank(&self) -> usize {
        self.qr.rank()
    }

    /// `ỹ`, or `None` when `y` leaves the range by more than `tol` relative.
    fn rhs(&self, y: &[f64], tol: f64) -> Option<Vec<f64>> {
        let ny = norm2(y);
        if self.qr.range_residual(y) > tol * ny {
            return None;
        }
        let mut c = y.to_vec();
        self.qr.apply_qt(&mut c);
        Some(self.qr.solve_r11(&c))
    }

    fn lift_dual(&self, beta_t: &[f64], m: usize) -> Vec<f64> {
        let z = self.qr.solve_r11_transpose(beta_t);
        let mut b = vec![0.0; m];
        b[..z.len()].copy_from_slice(&z);
        self.qr.apply_q(&mut b);
        b
    }
}

fn check_dims(v: &Matrix, y: &[f64]) -> Result<()> {
    if y.len() != v.rows() {
        return Err(Error::Dimension(format!(
            "y has {} entries, V has {} rows",
            y.len(),
            v.rows()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite entry in y".into()));
    }
    Ok(())
}

fn residual(v: &Matrix, u: &[f64], y: &[f64]) -> f64 {
    let vu = v.mul_vec(u);
    norm2(&vu.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<_>>())
}

fn map_status(s: LpStatus) -> SolveStatus {
    match s {
        LpStatus::Optimal => SolveStatus::Optimal,
        LpStatus::Infeasible => SolveStatus::Infeasible,
        LpStatus::Unbounded => SolveStatus::Unbounded,
        LpStatus::NumericFailure | LpStatus::IterationLimit => SolveStatus::NumericFailure,
    }
}

/// `min ‖u‖₁ s.t. V u = y` with default support threshold.
pub fn solve_bp(v: &Matrix, y: &[f64], feas_tol: f64) -> Result<SparseSolution> {
    let opts = BpOptions {
        feas_tol,
        ..BpOptions::default()
    };
    Ok(solve_bp_with(v, y, &opts)?.solution)
}

/// Primal and dual basis pursuit with a strong-duality check.
pub fn solve_bp_with(v: &Matrix, y: &[f64], opts: &BpOptions) -> Result<BpResult> {
    check_dims(v, y)?;
    let (m, n) = v.shape();
    let red = Reduced::new(v);
    let r = red.rank();
    let fail = |status| BpResult {
        solution: SparseSolution::failed(n, status, SolverKind::BpLp, opts.threshold),
        dual: DualSolution {
            beta: vec![0.0; m],
            objective: f64::NAN,
            status,
        },
        duality_gap: f64::NAN,
        iterations: 0,
    };
    let Some(yt) = red.rhs(y, opts.feas_tol) else {
        return Ok(fail(SolveStatus::Infeasible));
    };
    // solved for ỹ / max|ỹ|, then rescaled
    let scale = yt.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if r == 0 || scale == 0.0 {
        let sol = SparseSolution::new(vec![0.0; n], SolveStatus::Optimal, SolverKind::BpLp, norm2(y), opts.threshold);
        return Ok(BpResult {
            solution: sol,
            dual: DualSolution {
                beta: vec![0.0; m],
                objective: 0.0,
                status: SolveStatus::Optimal,
            },
            duality_gap: 0.0,
            iterations: 0,
        });
    }

    // primal: [G, -G] [u+; u-] = ỹ
    let mut a = Matrix::zeros(r, 2 * n);
    for i in 0..r {
        for j in 0..n {
            a[(i, j)] = red.g[(i, j)];
            a[(i, n + j)] = -red.g[(i, j)];
        }
    }
    let yt: Vec<f64> = yt.iter().map(|v| v / scale).collect();
    let primal = solve_standard_form(&a, &yt, &vec![1.0; 2 * n], &opts.simplex);
    if primal.status != LpStatus::Optimal {
        return Ok(fail(map_status(primal.status)));
    }
    let u: Vec<f64> = (0..n).map(|j| scale * (primal.x[j] - primal.x[n + j])).collect();

    let (mut dual, dual_iterations) = solve_reduced_dual(&red, &yt, m, &opts.simplex);
    dual.objective *= scale;
    let iterations = primal.iterations + dual_iterations;

    let res = residual(v, &u, y);
    let mut status = SolveStatus::Optimal;
    if res > opts.feas_tol * norm2(y).max(f64::MIN_POSITIVE) {
        status = SolveStatus::NumericFailure;
    }
    let p_obj = norm1(&u);
    let gap = (p_obj - dual.objective).abs();
    if dual.status != SolveStatus::Optimal || gap > DUALITY_TOL * p_obj.abs().max(dual.objective.abs()).max(1e-300) && gap > 1e-14 {
        status = SolveStatus::NumericFailure;
    }
    let mut sol = SparseSolution::new(u, status, SolverKind::BpLp, res, opts.threshold);
    sol.objective = p_obj;
    Ok(BpResult {
        solution: sol,
        dual,
        duality_gap: gap,
        iterations,
    })
}

/// `max ỹᵀβ̃ s.t. |Gᵀβ̃| ≤ 1` as a standard-form LP with slack basis.
fn solve_reduced_dual(red: &Reduced, yt: &[f64], m: usize, opts: &SimplexOptions) -> (DualSolution, usize) {
    let r = red.rank();
    let n = red.g.cols();
    // variables: β+ (r), β- (r), s (n), s' (n); rows: Gᵀβ + s = 1, -Gᵀβ + s' = 1
    let cols = 2 * r + 2 * n;
    let mut a = Matrix::zeros(2 * n, cols);
    for j in 0..n {
        for i in 0..r {
            let g = red.g[(i, j)];
            a[(j, i)] = g;
            a[(j, r + i)] = -g;
            a[(n + j, i)] = -g;
            a[(n + j, r + i)] = g;
        }
        a[(j, 2 * r + j)] = 1.0;
        a[(n + j, 2 * r + n + j)] = 1.0;
    }
    let mut c = vec![0.0; cols];
    for i in 0..r {
        c[i] = -yt[i];
        c[r + i] = yt[i];
    }
    let sol = solve_standard_form(&a, &vec![1.0; 2 * n], &c, opts);
    if sol.status != LpStatus::Optimal {
        return (
            DualSolution {
                beta: vec![0.0; m],
                objective: f64::NAN,
                status: map_status(sol.status),
            },
            sol.iterations,
        );
    }
    let bt: Vec<f64> = (0..r).map(|i| sol.x[i] - sol.x[r + i]).collect();
    let objective = yt.iter().zip(&bt).map(|(a, b)| a * b).sum();
    (
        DualSolution {
            beta: red.lift_dual(&bt, m),
            objective,
            status: SolveStatus::Optimal,
        },
        sol.iterations,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
    NumericFailure,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub status: FeasibilityStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
}

/// Existence of `β` with `V_iᵀβ = fixed(i)` on the fixed (1-based) indices
/// and `|V_jᵀβ| ≤ 1` elsewhere.
pub fn lp_feasibility(v: &Matrix, fixed: &BTreeMap<usize, f64>) -> Result<FeasibilityVerdict> {
    lp_feasibility_with(v, fixed, &SimplexOptions::default())
}

pub fn lp_feasibility_with(
    v: &Matrix,
    fixed: &BTreeMap<usize, f64>,
    opts: &SimplexOptions,
) -> Result<FeasibilityVerdict> {
    let (m, n) = v.shape();
    for (&i, &s) in fixed {
        if i == 0 || i > n {
            return Err(Error::IndexOutOfBounds { index: i, bound: n });
        }
        if !s.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite target at index {i}")));
        }
    }
    if fixed.is_empty() {
        return Ok(FeasibilityVerdict {
            status: FeasibilityStatus::Feasible,
            beta: Some(vec![0.0; m]),
        });
    }
    let red = Reduced::new(v);
    let r = red.rank();
    let free: Vec<usize> = (0..n).filter(|j| !fixed.contains_key(&(j + 1))).collect();
    let rows = fixed.len() + 2 * free.len();
    let cols = 2 * r + 2 * free.len();
    let mut a = Matrix::zeros(rows, cols);
    let mut b = vec![0.0; rows];
    for (row, (&i, &s)) in fixed.iter().enumerate() {
        for k in 0..r {
            a[(row, k)] = red.g[(k, i - 1)];
            a[(row, r + k)] = -red.g[(k, i - 1)];
        }
        b[row] = s;
    }
    let off = fixed.len();
    let nf = free.len();
    for (q, &j) in free.iter().enumerate() {
        for k in 0..r {
            let g = red.g[(k, j)];
            a[(off + q, k)] = g;
            a[(off + q, r + k)] = -g;
            a[(off + nf + q, k)] = -g;
            a[(off + nf + q, r + k)] = g;
        }
        a[(off + q, 2 * r + q)] = 1.0;
        a[(off + nf + q, 2 * r + nf + q)] = 1.0;
        b[off + q] = 1.0;
        b[off + nf + q] = 1.0;
    }
    let sol = solve_standard_form(&a, &b, &vec![0.0; cols], opts);
    match sol.status {
        LpStatus::Infeasible => Ok(FeasibilityVerdict {
            status: FeasibilityStatus::Infeasible,
            beta: None,
        }),
        LpStatus::Optimal => {
            let bt: Vec<f64> = (0..r).map(|k| sol.x[k] - sol.x[r + k]).collect();
            let beta = red.lift_dual(&bt, m);
            let vb = v.tr_mul_vec(&beta);
            let ok = (0..n).all(|j| match fixed.get(&(j + 1)) {
                Some(&s) => (vb[j] - s).abs() <= 1e-7 * (1.0 + s.abs()),
                None => vb[j].abs() <= 1.0 + 1e-7,
            });
            Ok(FeasibilityVerdict {
                status: if ok {
                    FeasibilityStatus::Feasible
                } else {
                    FeasibilityStatus::NumericFailure
                },
                beta: Some(beta),
            })
        }
        _ => Ok(FeasibilityVerdict {
            status: FeasibilityStatus::NumericFailure,
            beta: None,
        }),
    }
}
