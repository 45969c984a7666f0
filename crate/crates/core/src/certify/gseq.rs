use serde::{Deserialize, Serialize};

use super::failure::{krylov_closure, projected_coordinates};
use crate::error::{Error, Result};
use crate::generators::{ctrb, LtiSystem};
use crate::linalg::{antidiag_k, LeadingBlock, Matrix};
use crate::structure::{verify_sign_consistent, StructureReport};

/// `g_i(k) = (K_rᵀ c_{r+k})_i` and `p(k) = Σ_i g_i(k)` for `k = 1..=N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GSequences {
    /// `r` rows, `N` columns.
    pub g: Vec<Vec<f64>>,
    pub p: Vec<f64>,
    pub r: usize,
    pub sign_consistency: Option<StructureReport>,
    /// All `g_i` and `p` are log-concave when set.
    pub log_concavity_guaranteed: bool,
}

/// Transformed coefficient sequences of `C^{r+N}(A, b)`.
///
/// The sign-consistency hypothesis is checked on `C^{r+N}(A, b)ᵀ`, projected
/// onto its rank-`r` column space when `(A, b)` is not controllable.
pub fn g_sequences(a: &Matrix, b: &[f64], horizon: usize) -> Result<GSequences> {
    if horizon == 0 {
        return Err(Error::InvalidInput("N must be >= 1".into()));
    }
    let (r, _, _) = krylov_closure(a, b)?;
    let sys = LtiSystem::new(a.clone(), b.to_vec(), None)?;
    let v = ctrb(&sys, r + horizon)?;
    let block = LeadingBlock::new(&v, r)?;
    let kt = antidiag_k(r).transpose();
    let mut g = vec![Vec::with_capacity(horizon); r];
    let mut p = Vec::with_capacity(horizon);
    for col in r + 1..=r + horizon {
        let w = kt.mul_vec(&block.coeffs(col)?);
        p.push(w.iter().sum());
        for (gi, wi) in g.iter_mut().zip(&w) {
            gi.push(*wi);
        }
    }
    let w = if r < a.rows() { projected_coordinates(&v, r) } else { v };
    let sc = verify_sign_consistent(&w.transpose(), r, false).ok();
    let guaranteed = sc.as_ref().is_some_and(|s| s.holds && s.conclusive);
    Ok(GSequences {
        g,
        p,
        r,
        sign_consistency: sc,
        log_concavity_guaranteed: guaranteed,
    })
}
