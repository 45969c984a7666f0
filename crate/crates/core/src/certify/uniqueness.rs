use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::matrix::{norm2, norm_inf};
use crate::linalg::{binomial, rank_estimate, Matrix, DEFAULT_RANK_TOL};
use crate::solvers::DEFAULT_SUPPORT_THRESHOLD;
use crate::structure::{pena_transform, verify_sign_consistent, verify_totally_positive};

/// Largest `C(n, m)` enumerated by the brute-force independence check.
pub const INDEPENDENCE_CAP: u128 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndependenceRoute {
    /// Strict sign consistency of `Vᵀ` confirmed by total positivity of the
    /// Peña matrix.
    PenaTransform,
    /// Strict sign consistency of `Vᵀ` alone.
    StrictSignConsistency,
    BruteForce,
    Intractable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessCertificate {
    pub cardinality: usize,
    pub bound: usize,
    pub bound_ok: bool,
    pub independence_ok: bool,
    /// False when independence could not be decided.
    pub independence_conclusive: bool,
    pub independence_route: IndependenceRoute,
    pub unique: bool,
    pub threshold: f64,
}

/// Every `m` columns of `V` are linearly independent.
fn independence(v: &Matrix) -> Result<(bool, bool, IndependenceRoute)> {
    let (m, n) = v.shape();
    if n < m {
        return Ok((false, true, IndependenceRoute::BruteForce));
    }
    let vt = v.transpose();
    let ssc = match verify_sign_consistent(&vt, m, true) {
        Ok(rep) => Some(rep),
        Err(Error::CompoundTooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    if let Some(rep) = ssc.filter(|r| r.holds) {
        let route = if n > m {
            let pena = pena_transform(&vt).and_then(|c| {
                let signed = c.scale(f64::from(rep.shared_sign));
                verify_totally_positive(&signed, c.rows().min(c.cols()), true)
            });
            match pena {
                Ok(tp) if tp.holds => IndependenceRoute::PenaTransform,
                _ => IndependenceRoute::StrictSignConsistency,
            }
        } else {
            IndependenceRoute::StrictSignConsistency
        };
        return Ok((true, true, route));
    }
    if binomial(n, m) > INDEPENDENCE_CAP {
        return Ok((false, false, IndependenceRoute::Intractable));
    }
    let rows: Vec<usize> = (0..m).collect();
    let ok = (0..n)
        .combinations(m)
        .all(|cs| rank_estimate(&v.select(&rows, &cs), DEFAULT_RANK_TOL) == m);
    Ok((ok, true, IndependenceRoute::BruteForce))
}

/// Sufficient test for `u` being the unique sparsest solution of `V x = V u`.
pub fn uniqueness_check(v: &Matrix, u: &[f64]) -> Result<UniquenessCertificate> {
    uniqueness_check_with(v, u, None, DEFAULT_SUPPORT_THRESHOLD)
}

pub fn uniqueness_check_with(
    v: &Matrix,
    u: &[f64],
    y: Option<&[f64]>,
    threshold: f64,
) -> Result<UniquenessCertificate> {
    if u.len() != v.cols() {
        return Err(Error::Dimension(format!(
            "u has {} entries, V has {} columns",
            u.len(),
            v.cols()
        )));
    }
    if let Some(y) = y {
        if y.len() != v.rows() {
            return Err(Error::Dimension("y length".into()));
        }
        let vu = v.mul_vec(u);
        let res = norm2(&vu.iter().zip(y).map(|(a, b)| a - b).collect::<Vec<_>>());
        if res > 1e-8 * norm2(y) {
            return Err(Error::InvalidInput(format!("V u misses y by {res:e}")));
        }
    }
    let cut = threshold * norm_inf(u);
    let cardinality = u.iter().filter(|x| x.abs() > cut && **x != 0.0).count();
    let bound = v.rows() / 2;
    let (independence_ok, conclusive, route) = independence(v)?;
    let bound_ok = cardinality <= bound;
    Ok(UniquenessCertificate {
        cardinality,
        bound,
        bound_ok,
        independence_ok,
        independence_conclusive: conclusive,
        independence_route: route,
        unique: bound_ok && independence_ok,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{ctrb, LtiSystem};

    #[test]
    fn vandermonde_two_sparse() {
        let v = ctrb(&LtiSystem::diagonal(&[0.8, 0.7, 0.6, 0.5, 0.4]).unwrap(), 12).unwrap();
        let mut u = vec![0.0; 12];
        u[2] = 1.0;
        u[9] = -1.0;
        let c = uniqueness_check(&v, &u).unwrap();
        assert!(c.unique);
        assert_eq!(c.bound, 2);
        u[4] = 0.5;
        let c = uniqueness_check(&v, &u).unwrap();
        assert!(!c.unique && !c.bound_ok && c.independence_ok);
    }

    #[test]
    fn dependent_pair() {
        let v = Matrix::from_rows(&[vec![1.0, 1.0, 0.0, 2.0], vec![2.0, 2.0, 1.0, 1.0]]).unwrap();
        let c = uniqueness_check(&v, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(!c.independence_ok && c.independence_conclusive);
        assert_eq!(c.independence_route, IndependenceRoute::BruteForce);
        assert!(!c.unique);
        assert!(uniqueness_check_with(&v, &[1.0, 0.0, 0.0, 0.0], Some(&[1.0, 0.0]), 1e-6).is_err());
    }
}
