use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::lti::{ctrb, LtiSystem};
use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};

/// Fuel-optimal steering instance `V u = y` with `V = C^N(A, b)`.
///
/// Column `i` (1-based) of `V` is `A^{i−1} b` and carries the input at
/// time `t = N − i`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FuelInstance {
    pub system: LtiSystem,
    pub horizon: usize,
    pub xi: Vec<f64>,
    #[serde(skip)]
    pub v: Option<Matrix>,
    pub y: Vec<f64>,
    pub u_true: BTreeMap<usize, f64>,
    /// `(column, time)` pairs for every column.
    pub time_of_column: Vec<(usize, usize)>,
}

impl FuelInstance {
    pub fn column_of_time(&self, t: usize) -> usize {
        self.horizon - t
    }

    pub fn time_of(&self, column: usize) -> usize {
        self.horizon - column
    }

    /// Reverse-time stacking of `u_true` as a vector over columns.
    pub fn stacked_u(&self) -> Vec<f64> {
        let mut u = vec![0.0; self.horizon];
        for (&t, &val) in &self.u_true {
            u[self.column_of_time(t) - 1] = val;
        }
        u
    }

    pub fn matrix(&self) -> Result<Matrix> {
        match &self.v {
            Some(v) => Ok(v.clone()),
            None => ctrb(&self.system, self.horizon),
        }
    }

    /// Forward simulation of `x(t+1) = A x(t) + b u(t)` from `ξ`.
    pub fn simulate(&self) -> Vec<f64> {
        let mut x = self.xi.clone();
        for t in 0..self.horizon {
            let u = self.u_true.get(&t).copied().unwrap_or(0.0);
            x = self.system.a.mul_vec(&x);
            for (xi, bi) in x.iter_mut().zip(&self.system.b) {
                *xi += bi * u;
            }
        }
        x
    }
}

/// Builds the instance whose initial state is steered to the origin at time
/// `N` by the input `u_true` (time → value).
pub fn fuel_instance(
    sys: &LtiSystem,
    horizon: usize,
    u_true: &BTreeMap<usize, f64>,
) -> Result<FuelInstance> {
    if horizon == 0 {
        return Err(Error::InvalidInput("horizon N must be >= 1".into()));
    }
    if let Some(&t) = u_true.keys().find(|&&t| t >= horizon) {
        return Err(Error::InvalidInput(format!(
            "input time {t} outside 0..{horizon}"
        )));
    }
    let m = sys.order();
    let mut xi = vec![0.0; m];
    if u_true.values().any(|&v| v != 0.0) {
        let lu = Lu::factor(&sys.a)?;
        if lu.is_singular() {
            return Err(Error::Singular);
        }
        // w = A^{-(t+1)} b, accumulated for increasing t
        let last = *u_true.keys().next_back().unwrap();
        let mut w = sys.b.clone();
        for t in 0..=last {
            w = lu.solve(&w)?;
            if let Some(&val) = u_true.get(&t) {
                for (x, wi) in xi.iter_mut().zip(&w) {
                    *x -= wi * val;
                }
            }
        }
    }
    let mut y = xi.clone();
    for _ in 0..horizon {
        y = sys.a.mul_vec(&y);
    }
    y.iter_mut().for_each(|v| *v = -*v);
    let v = ctrb(sys, horizon)?;
    Ok(FuelInstance {
        system: sys.clone(),
        horizon,
        xi,
        v: Some(v),
        y,
        u_true: u_true.clone(),
        time_of_column: (1..=horizon).map(|c| (c, horizon - c)).collect(),
    })
}
