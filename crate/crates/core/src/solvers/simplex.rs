//! Dense two-phase revised simplex with Bland's rule.
//!
//! Solves `min cᵀx  s.t.  A x = b, x ≥ 0`. The basis inverse is kept
//! explicitly and updated by elementary row operations, with a fresh LU
//! inverse every `refactor_every` pivots.

use serde::{Deserialize, Serialize};

use crate::linalg::{Lu, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericFailure,
    IterationLimit,
}

#[derive(Clone, Debug)]
pub struct SimplexOptions {
    /// Reduced costs below `-cost_tol` are improving.
    pub cost_tol: f64,
    /// Smallest acceptable pivot magnitude.
    pub pivot_tol: f64,
    /// Phase-1 objective above `feas_tol · max(1, ‖b‖∞)` means infeasible.
    pub feas_tol: f64,
    pub max_iter: usize,
    pub refactor_every: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            cost_tol: 1e-10,
            pivot_tol: 1e-11,
            feas_tol: 1e-9,
            max_iter: 100_000,
            refactor_every: 64,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// Simplex multipliers `c_Bᵀ B⁻¹` at termination.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

struct Tableau<'a> {
    a: &'a Matrix,
    basis: Vec<usize>,
    binv: Matrix,
    xb: Vec<f64>,
    b: &'a [f64],
    since_refactor: usize,
}

impl<'a> Tableau<'a> {
    fn column(&self, j: usize) -> Vec<f64> {
        self.a.column(j)
    }

    fn refactor(&mut self) -> bool {
        let cols: Vec<Vec<f64>> = self.basis.iter().map(|&j| self.column(j)).collect();
        let bm = match Matrix::from_columns(&cols) {
            Ok(bm) => bm,
            Err(_) => return false,
        };
        let lu = match Lu::factor(&bm) {
            Ok(lu) if !lu.is_singular() => lu,
            _ => return false,
        };
        match lu.inverse() {
            Ok(inv) => self.binv = inv,
            Err(_) => return false,
        }
        self.xb = self.binv.mul_vec(self.b);
        for v in self.xb.iter_mut() {
            if *v < 0.0 && *v > -1e-12 {
                *v = 0.0;
            }
        }
        self.since_refactor = 0;
        true
    }

    fn pivot(&mut self, row: usize, entering: usize, dir: &[f64]) {
        let m = self.basis.len();
        let p = dir[row];
        for j in 0..m {
            self.binv[(row, j)] /= p;
        }
        self.xb[row] /= p;
        for i in 0..m {
            if i == row || dir[i] == 0.0 {
                continue;
            }
            let f = dir[i];
            for j in 0..m {
                let v = self.binv[(row, j)];
                self.binv[(i, j)] -= f * v;
            }
            self.xb[i] -= f * self.xb[row];
            if self.xb[i] < 0.0 && self.xb[i] > -1e-12 {
                self.xb[i] = 0.0;
            }
        }
        self.basis[row] = entering;
        self.since_refactor += 1;
    }

    fn multipliers(&self, c: &[f64]) -> Vec<f64> {
        let cb: Vec<f64> = self.basis.iter().map(|&j| c[j]).collect();
        self.binv.tr_mul_vec(&cb)
    }

    /// Runs Bland's rule on cost `c`; columns with `allowed[j] == false`
    /// never enter.
    fn run(&mut self, c: &[f64], allowed: &[bool], opts: &SimplexOptions, iters: &mut usize) -> LpStatus {
        let n = self.a.cols();
        loop {
            if *iters >= opts.max_iter {
                return LpStatus::IterationLimit;
            }
            if self.since_refactor >= opts.refactor_every && !self.refactor() {
                return LpStatus::NumericFailure;
            }
            let pi = self.multipliers(c);
            let mut in_basis = vec![false; n];
            for &j in &self.basis {
                in_basis[j] = true;
            }
            let entering = (0..n).find(|&j| {
                if in_basis[j] || !allowed[j] {
                    return false;
                }
                let col = self.column(j);
                let d = c[j] - pi.iter().zip(&col).map(|(p, a)| p * a).sum::<f64>();
                d < -opts.cost_tol
            });
            let Some(e) = entering else {
                return LpStatus::Optimal;
            };
            let dir = self.binv.mul_vec(&self.column(e));
            let mut best: Option<(usize, f64)> = None;
            for (i, &d) in dir.iter().enumerate() {
                if d <= opts.pivot_tol {
                    continue;
                }
                let ratio = self.xb[i].max(0.0) / d;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let tie = (ratio - br).abs() <= 1e-12 * br.abs().max(1e-300);
                        if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((row, _)) = best else {
                return LpStatus::Unbounded;
            };
            self.pivot(row, e, &dir);
            *iters += 1;
        }
    }
}

/// Solves `min cᵀx s.t. A x = b, x ≥ 0`.
pub fn solve_standard_form(a: &Matrix, b: &[f64], c: &[f64], opts: &SimplexOptions) -> LpSolution {
    let (m, n) = a.shape();
    assert_eq!(b.len(), m, "rhs length must equal row count");
    assert_eq!(c.len(), n, "cost length must equal column count");

    // sign-normalize rows so that b >= 0
    let mut rows = a.to_rows();
    let mut rhs = b.to_vec();
    let mut flipped = vec![false; m];
    for i in 0..m {
        if rhs[i] < 0.0 {
            rhs[i] = -rhs[i];
            rows[i].iter_mut().for_each(|v| *v = -*v);
            flipped[i] = true;
        }
    }

    // crash basis from exact unit columns; artificials for the rest
    let mut basis = vec![usize::MAX; m];
    for j in 0..n {
        let nz: Vec<usize> = (0..m).filter(|&i| rows[i][j] != 0.0).collect();
        if nz.len() == 1 && rows[nz[0]][j] == 1.0 && basis[nz[0]] == usize::MAX {
            basis[nz[0]] = j;
        }
    }
    let art_rows: Vec<usize> = (0..m).filter(|&i| basis[i] == usize::MAX).collect();
    let total = n + art_rows.len();
    for (k, &i) in art_rows.iter().enumerate() {
        for (r, row) in rows.iter_mut().enumerate() {
            row.push(if r == i { 1.0 } else { 0.0 });
        }
        basis[i] = n + k;
    }
    let ext = Matrix::from_rows(&rows).unwrap_or_else(|_| Matrix::zeros(m, total));
    let mut tab = Tableau {
        a: &ext,
        basis,
        binv: Matrix::identity(m),
        xb: rhs.clone(),
        b: &rhs,
        since_refactor: 0,
    };
    let mut iters = 0;

    if !art_rows.is_empty() {
        let mut c1 = vec![0.0; total];
        c1[n..].iter_mut().for_each(|v| *v = 1.0);
        let allowed = vec![true; total];
        let st = tab.run(&c1, &allowed, opts, &mut iters);
        if st != LpStatus::Optimal {
            return failed(st, n, m, iters);
        }
        if !tab.refactor() {
            return failed(LpStatus::NumericFailure, n, m, iters);
        }
        let infeas: f64 = tab
            .basis
            .iter()
            .zip(&tab.xb)
            .filter(|(&j, _)| j >= n)
            .map(|(_, &v)| v)
            .sum();
        let scale = rhs.iter().fold(1.0f64, |s, v| s.max(v.abs()));
        if infeas > opts.feas_tol * scale {
            return failed(LpStatus::Infeasible, n, m, iters);
        }
        // drive basic artificials out where a structural column can replace them
        for row in 0..m {
            if tab.basis[row] < n {
                continue;
            }
            let in_basis: Vec<bool> = (0..total).map(|j| tab.basis.contains(&j)).collect();
            let rowv: Vec<f64> = (0..m).map(|k| tab.binv[(row, k)]).collect();
            let cand = (0..n).find(|&j| {
                !in_basis[j]
                    && ext
                        .column(j)
                        .iter()
                        .zip(&rowv)
                        .map(|(a, r)| a * r)
                        .sum::<f64>()
                        .abs()
                        > 1e-9
            });
            if let Some(j) = cand {
                let dir = tab.binv.mul_vec(&ext.column(j));
                tab.pivot(row, j, &dir);
            }
        }
    }

    let mut c2 = c.to_vec();
    c2.resize(total, 0.0);
    let mut allowed = vec![true; total];
    allowed[n..].iter_mut().for_each(|v| *v = false);
    let st = tab.run(&c2, &allowed, opts, &mut iters);
    if st != LpStatus::Optimal {
        return failed(st, n, m, iters);
    }
    if !tab.refactor() {
        return failed(LpStatus::NumericFailure, n, m, iters);
    }
    let mut x = vec![0.0; n];
    for (&j, &v) in tab.basis.iter().zip(&tab.xb) {
        if j < n {
            x[j] = v.max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    let mut duals = tab.multipliers(&c2);
    for (d, &f) in duals.iter_mut().zip(&flipped) {
        if f {
            *d = -*d;
        }
    }
    LpSolution {
        status: LpStatus::Optimal,
        x,
        objective,
        duals,
        iterations: iters,
    }
}

fn failed(status: LpStatus, n: usize, m: usize, iterations: usize) -> LpSolution {
    LpSolution {
        status,
        x: vec![0.0; n],
        objective: f64::NAN,
        duals: vec![0.0; m],
        iterations,
    }
}
