use serde::{Deserialize, Serialize};

use super::pvector::{p_vector, PEvaluator, PVector};
use crate::error::{Error, Result};
use crate::linalg::matrix::norm1;
use crate::linalg::{
    det, forward_difference, hadamard_scale, rank_estimate, LeadingBlock, Matrix,
    DEFAULT_RANK_TOL,
};
use crate::structure::{
    classify, verify_sign_consistent, verify_variation_bounding, Property, Route,
    StructureReport,
};

/// `p_k` counts as a failure only when `1 − p_k > P_TOL`.
pub const P_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertRoute {
    ThmL1Necessary,
    ThmCharPoly,
    ThmUnimodalBisection,
    FullScan,
}

/// Characteristic polynomial data; coefficients exclude the monic leading
/// term and are listed from `s^{r−1}` down to `s^0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharPoly {
    pub projected: Vec<f64>,
    pub projected_sum: f64,
    pub raw: Vec<f64>,
    pub raw_sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureCertificate {
    pub route: CertRoute,
    pub r: usize,
    pub n: usize,
    pub tol: f64,
    /// 1-based column indices `k > r` with `p_k < 1 − tol`.
    pub failure_indices: Vec<usize>,
    /// Indices with `|1 − p_k| ≤ tol`, excluded from the certificate.
    pub marginal_indices: Vec<usize>,
    pub critical_index: Option<usize>,
    pub unimodality_certified: bool,
    pub char_poly_coeff_sum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub char_poly: Option<CharPoly>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probes: Option<usize>,
}

impl FailureCertificate {
    fn new(route: CertRoute, r: usize, n: usize, tol: f64) -> Self {
        Self {
            route,
            r,
            n,
            tol,
            failure_indices: Vec::new(),
            marginal_indices: Vec::new(),
            critical_index: None,
            unimodality_certified: false,
            char_poly_coeff_sum: None,
            char_poly: None,
            probes: None,
        }
    }

    fn fill_from_scan(&mut self, p: &PVector) {
        for (i, &pk) in p.values.iter().enumerate().skip(p.r) {
            if 1.0 - pk > self.tol {
                self.failure_indices.push(i + 1);
            } else if (1.0 - pk).abs() <= self.tol {
                self.marginal_indices.push(i + 1);
            }
        }
        self.critical_index = self.failure_indices.first().copied();
    }
}

fn require_image(p: &PVector) -> Result<()> {
    if p.image_condition_ok {
        Ok(())
    } else {
        Err(Error::ImageCondition(format!(
            "columns leave the span of the leading rank-{} block (residual {:e})",
            p.r, p.max_residual
        )))
    }
}

/// Every column index at which a nonzero rules out ℓ1 recovery.
pub fn failure_indices(v: &Matrix, tol: f64) -> Result<FailureCertificate> {
    let p = p_vector(v)?;
    require_image(&p)?;
    let mut cert = FailureCertificate::new(CertRoute::FullScan, p.r, v.cols(), tol);
    cert.fill_from_scan(&p);
    cert.probes = Some(v.cols());
    Ok(cert)
}

/// Outcome of the unimodality test on `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnimodalityReport {
    pub certified: bool,
    /// Order of the sign conditions (`m`, or the rank for deficient `V`).
    pub order: usize,
    pub projected: bool,
    pub sign_consistency: StructureReport,
    pub difference_bounding: Option<StructureReport>,
    pub leading_det: f64,
    pub leading_det_nonzero: bool,
}

/// `V[:,1:r]ᵀ V`: an invertible left transform of the leading-block
/// coordinates without the identity block, so every `r`-minor keeps its sign
/// and condensation is not defeated by structural zeros.
pub(crate) fn projected_coordinates(v: &Matrix, r: usize) -> Matrix {
    v.leading_columns(r).transpose().mul(v)
}

/// Sufficient test for unimodality of `p`.
///
/// Requires `Vᵀ ∈ SC_m`, `Δ(Vᵀ) ∈ VB_{m−1}` and an invertible leading block.
/// A rank-deficient `V` is first replaced by its coordinates in the leading
/// rank-`r` block, which leaves `p` unchanged.
pub fn certify_unimodality(v: &Matrix) -> Result<UnimodalityReport> {
    let (m, n) = v.shape();
    if m >= n {
        return Err(Error::Dimension(format!("need m < n, got {m}x{n}")));
    }
    let r = rank_estimate(v, DEFAULT_RANK_TOL);
    let (w, projected) = if r < m {
        (projected_coordinates(v, r), true)
    } else {
        (v.clone(), false)
    };
    let order = w.rows();
    let wt = w.transpose();
    let sc = match verify_sign_consistent(&wt, order, false) {
        Ok(rep) => rep,
        Err(Error::CompoundTooLarge { .. }) => {
            StructureReport::new(Property::SC, order, Route::ExhaustiveCompound)
                .inconclusive("compound cap exceeded")
        }
        Err(e) => return Err(e),
    };
    let diff = if order + 1 < n {
        let d = forward_difference(&wt)?;
        Some(verify_variation_bounding(&d, order - 1)?)
    } else {
        None
    };
    let lead = w.leading_columns(order);
    let leading_det = det(&lead)?;
    let all: Vec<usize> = (0..order).collect();
    let leading_det_nonzero = classify(leading_det, hadamard_scale(&lead, &all, &all)) != 0;
    let certified = sc.holds
        && diff.as_ref().is_some_and(|d| d.holds)
        && leading_det_nonzero;
    Ok(UnimodalityReport {
        certified,
        order,
        projected,
        sign_consistency: sc,
        difference_bounding: diff,
        leading_det,
        leading_det_nonzero,
    })
}

/// Smallest failing column, by bisection when `p` is certified unimodal.
pub fn critical_index(v: &Matrix, tol: f64) -> Result<FailureCertificate> {
    let ev = PEvaluator::new(v)?;
    let uni = if v.rows() < v.cols() {
        certify_unimodality(v)?.certified
    } else {
        false
    };
    let (r, n) = (ev.r(), ev.n());
    if !uni {
        let p = ev.scan()?;
        require_image(&p)?;
        let mut cert = FailureCertificate::new(CertRoute::FullScan, r, n, tol);
        cert.fill_from_scan(&p);
        cert.probes = Some(ev.probes());
        return Ok(cert);
    }
    let mut cert = FailureCertificate::new(CertRoute::ThmUnimodalBisection, r, n, tol);
    cert.unimodality_certified = true;
    let fails = |k: usize| -> Result<bool> { Ok(1.0 - ev.p(k)? > tol) };
    if r < n && fails(n)? {
        // p is nonincreasing past its peak, so failures form a suffix
        let (mut lo, mut hi) = (r + 1, n);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if fails(mid)? {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        cert.critical_index = Some(lo);
        cert.failure_indices = (lo..=n).collect();
    }
    cert.probes = Some(ev.probes());
    Ok(cert)
}

/// Krylov rank `r` of `(A, b)` and the coordinates of `A^r b` in
/// `[b, Ab, …, A^{r−1}b]`.
pub(crate) fn krylov_closure(a: &Matrix, b: &[f64]) -> Result<(usize, Matrix, Vec<f64>)> {
    if !a.is_square() || b.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "A is {}x{}, b has {} entries",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let mut cols = vec![b.to_vec()];
    let mut r = rank_estimate(&Matrix::from_columns(&cols)?, DEFAULT_RANK_TOL);
    if r == 0 {
        return Err(Error::InvalidInput("b is zero".into()));
    }
    loop {
        let next = a.mul_vec(cols.last().unwrap());
        cols.push(next);
        let rk = rank_estimate(&Matrix::from_columns(&cols)?, DEFAULT_RANK_TOL);
        if rk == r {
            break;
        }
        r = rk;
    }
    let k = Matrix::from_columns(&cols)?;
    let c = LeadingBlock::new(&k, r)?.coeffs(r + 1)?;
    Ok((r, k, c))
}

/// Characteristic polynomial coefficients of a square matrix.
fn faddeev_leverrier(a: &Matrix) -> Vec<f64> {
    let n = a.rows();
    let mut coeffs = Vec::with_capacity(n);
    let mut mk = Matrix::zeros(n, n);
    let mut ck = 1.0;
    for k in 1..=n {
        let mut next = a.mul(&mk);
        for i in 0..n {
            next[(i, i)] += ck;
        }
        mk = next;
        let amk = a.mul(&mk);
        let tr: f64 = (0..n).map(|i| amk[(i, i)]).sum();
        ck = -tr / k as f64;
        coeffs.push(ck);
    }
    coeffs
}

/// Horizon-free failure test through the projected companion polynomial.
///
/// When `Σ|αᵢ| < 1 − P_TOL` every column past the Krylov rank of `(A, b)` is
/// a failure index for any horizon; `horizon` only sizes the reported set.
pub fn certify_drastic_failure(a: &Matrix, b: &[f64], horizon: usize) -> Result<FailureCertificate> {
    let (r, _, c) = krylov_closure(a, b)?;
    // A^r b = Σ c_i A^{i−1} b  ⇒  s^r − c_r s^{r−1} − … − c_1
    let projected: Vec<f64> = c.iter().rev().map(|x| if *x == 0.0 { 0.0 } else { -x }).collect();
    let projected_sum = norm1(&projected);
    let raw = faddeev_leverrier(a);
    let raw_sum = norm1(&raw);
    let mut cert = FailureCertificate::new(CertRoute::ThmCharPoly, r, horizon, P_TOL);
    cert.char_poly_coeff_sum = Some(projected_sum);
    cert.char_poly = Some(CharPoly {
        projected,
        projected_sum,
        raw,
        raw_sum,
    });
    if 1.0 - projected_sum > P_TOL {
        cert.failure_indices = (r + 1..=horizon).collect();
        cert.critical_index = cert.failure_indices.first().copied();
    } else if (1.0 - projected_sum).abs() <= P_TOL {
        cert.marginal_indices = (r + 1..=horizon).collect();
    }
    Ok(cert)
}
