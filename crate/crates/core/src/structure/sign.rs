//! Sign consistency, total positivity and variation bounding.

use itertools::Itertools;

use super::report::{classify, Property, Route, RouteStats, StructureReport, Witness};
use crate::error::{Error, Result};
use crate::linalg::{
    antidiag_k, binomial, consecutive_minors_upto, det, hadamard_scale, rank_estimate, IndexTuple,
    Lu, Matrix, MinorSequence, COMPOUND_CAP, DEFAULT_RANK_TOL,
};

fn check_order(x: &Matrix, k: usize) -> Result<()> {
    let max = x.rows().min(x.cols());
    if k == 0 || k > max {
        return Err(Error::OrderOutOfRange { order: k, min: 1, max });
    }
    Ok(())
}

fn witness(rows: &[usize], cols: &[usize], value: f64, swap: bool) -> Witness {
    let (r, c) = (IndexTuple::from_zero_based(rows), IndexTuple::from_zero_based(cols));
    if swap {
        Witness { rows: c, cols: r, value }
    } else {
        Witness { rows: r, cols: c, value }
    }
}

fn seq_witness(seq: &MinorSequence, idx: usize, swap: bool) -> Witness {
    let (r, c) = seq.window(idx);
    if swap {
        Witness { rows: c, cols: r, value: seq.values[idx] }
    } else {
        Witness { rows: r, cols: c, value: seq.values[idx] }
    }
}

/// First strictly positive, strictly negative and dead-zone entries seen.
#[derive(Default)]
struct SignTally {
    pos: Option<Witness>,
    neg: Option<Witness>,
    zero: Option<Witness>,
    first_strict: Option<i8>,
}

impl SignTally {
    fn push(&mut self, s: i8, w: impl FnOnce() -> Witness) {
        let slot = match s {
            1 => &mut self.pos,
            -1 => &mut self.neg,
            _ => &mut self.zero,
        };
        if slot.is_none() {
            *slot = Some(w());
            if s != 0 && self.first_strict.is_none() {
                self.first_strict = Some(s);
            }
        }
    }

    fn conflict(&self) -> bool {
        self.pos.is_some() && self.neg.is_some()
    }

    /// Opposite-sign pair ordered by discovery.
    fn conflict_pair(&self) -> Vec<Witness> {
        let (p, n) = (self.pos.clone().unwrap(), self.neg.clone().unwrap());
        if self.first_strict == Some(1) {
            vec![p, n]
        } else {
            vec![n, p]
        }
    }

    fn sign(&self) -> i8 {
        self.first_strict.unwrap_or(0)
    }
}

/// Decides (strict) `k`-sign consistency.
///
/// For `k = min(rows, cols)` the consecutive-minor test on the wide
/// orientation is tried first. When its hypotheses fail the check falls
/// back to all `k`-minors, or to the Peña matrix when the compound would
/// exceed the cap.
pub fn verify_sign_consistent(x: &Matrix, k: usize, strict: bool) -> Result<StructureReport> {
    verify_sign_consistent_with_cap(x, k, strict, COMPOUND_CAP)
}

pub fn verify_sign_consistent_with_cap(
    x: &Matrix,
    k: usize,
    strict: bool,
    cap: u128,
) -> Result<StructureReport> {
    check_order(x, k)?;
    let property = if strict { Property::SSC } else { Property::SC };
    let mut stats = RouteStats::default();
    let square_order = k == x.rows().min(x.cols());

    if square_order {
        let swap = x.rows() > x.cols();
        let xo = if swap { x.transpose() } else { x.clone() };
        let levels = consecutive_minors_upto(&xo, k)?;
        stats.lu_fallbacks = levels.iter().map(|l| l.fallbacks).sum();

        let mut leading_ok = true;
        for seq in &levels[..k - 1] {
            let mut sign = 0i8;
            for idx in (0..seq.len()).filter(|&i| seq.row_offsets[i] == 1) {
                stats.minors_evaluated += 1;
                let s = classify(seq.values[idx], seq.scales[idx]);
                if s == 0 || (sign != 0 && s != sign) {
                    leading_ok = false;
                    break;
                }
                sign = s;
            }
            if !leading_ok {
                break;
            }
        }

        let top = &levels[k - 1];
        let mut tally = SignTally::default();
        for idx in 0..top.len() {
            stats.minors_evaluated += 1;
            let s = classify(top.values[idx], top.scales[idx]);
            tally.push(s, || seq_witness(top, idx, swap));
        }
        let mut rep = StructureReport::new(property, k, Route::ConsecutiveMinors);
        rep.stats = stats.clone();
        if tally.conflict() {
            rep.witnesses = tally.conflict_pair();
            return Ok(rep);
        }
        if let (true, Some(z)) = (strict, tally.zero.clone()) {
            rep.witnesses = vec![z];
            return Ok(rep);
        }
        if leading_ok {
            rep.holds = true;
            rep.shared_sign = tally.sign();
            return Ok(rep);
        }
    }

    let entries = binomial(x.rows(), k) * binomial(x.cols(), k);
    if entries <= cap {
        let mut rep = exhaustive_sign_scan(x, k, strict)?;
        rep.stats.minors_evaluated += stats.minors_evaluated;
        rep.stats.lu_fallbacks += stats.lu_fallbacks;
        return Ok(rep);
    }
    if square_order && x.rows() != x.cols() {
        let mut rep = pena_sign_check(x, strict)?;
        rep.stats.minors_evaluated += stats.minors_evaluated;
        rep.stats.lu_fallbacks += stats.lu_fallbacks;
        return Ok(rep);
    }
    Err(Error::CompoundTooLarge { entries, cap })
}

fn exhaustive_sign_scan(x: &Matrix, k: usize, strict: bool) -> Result<StructureReport> {
    let property = if strict { Property::SSC } else { Property::SC };
    let mut rep = StructureReport::new(property, k, Route::ExhaustiveCompound);
    let mut tally = SignTally::default();
    let col_sets: Vec<Vec<usize>> = (0..x.cols()).combinations(k).collect();
    'outer: for rs in (0..x.rows()).combinations(k) {
        for cs in &col_sets {
            let v = det(&x.select(&rs, cs))?;
            rep.stats.minors_evaluated += 1;
            let s = classify(v, hadamard_scale(x, &rs, cs));
            tally.push(s, || witness(&rs, cs, v, false));
            if tally.conflict() || (strict && tally.zero.is_some()) {
                break 'outer;
            }
        }
    }
    if tally.conflict() {
        rep.witnesses = tally.conflict_pair();
    } else if strict && tally.zero.is_some() {
        rep.witnesses = vec![tally.zero.unwrap()];
    } else {
        rep.holds = true;
        rep.shared_sign = tally.sign();
    }
    Ok(rep)
}

/// Row set `γ` (1-based) of the `m`-minor of `X` matching the minor of the
/// Peña matrix `C` on rows `rows_c` and columns `cols_c` (both 1-based).
///
/// `det(X[γ,:]) = det(X[1:m,:]) · det(C[rows_c, cols_c])`.
pub fn pena_row_set(m: usize, rows_c: &[usize], cols_c: &[usize]) -> Vec<usize> {
    let mut gamma: Vec<usize> = (1..=m)
        .filter(|i| !cols_c.contains(i))
        .map(|i| m + 1 - i)
        .collect();
    gamma.extend(rows_c.iter().map(|r| m + r));
    gamma.sort_unstable();
    gamma
}

/// `C` from `X · X[1:m,:]⁻¹ · K_m = [K_m; C]` for a tall `X ∈ R^{n×m}`.
pub fn pena_transform(x: &Matrix) -> Result<Matrix> {
    let (n, m) = x.shape();
    if n < m {
        return Err(Error::Dimension(format!(
            "Peña transform needs rows >= cols, got {n}x{m}"
        )));
    }
    let top = x.block(0, 0, m, m);
    let d = det(&top)?;
    let idx: Vec<usize> = (0..m).collect();
    if classify(d, hadamard_scale(&top, &idx, &idx)) == 0 {
        return Err(Error::Singular);
    }
    let inv = Lu::factor(&top)?.inverse()?;
    let t = inv.mul(&antidiag_k(m));
    Ok(x.block(m, 0, n - m, m).mul(&t))
}

fn pena_sign_check(x: &Matrix, strict: bool) -> Result<StructureReport> {
    let property = if strict { Property::SSC } else { Property::SC };
    let swap = x.rows() < x.cols();
    let xt = if swap { x.transpose() } else { x.clone() };
    let (_, m) = xt.shape();
    let mut rep = StructureReport::new(property, m, Route::PenaTransform);
    let idx: Vec<usize> = (0..m).collect();
    let top = xt.block(0, 0, m, m);
    let d = det(&top)?;
    let top_sign = classify(d, hadamard_scale(&top, &idx, &idx));
    rep.stats.minors_evaluated += 1;
    if top_sign == 0 {
        if strict {
            rep.witnesses = vec![witness(&idx, &idx, d, swap)];
            return Ok(rep);
        }
        return Ok(rep.inconclusive("leading minor lies in the dead zone"));
    }
    let c = pena_transform(&xt)?;
    let q = c.rows().min(c.cols());
    let levels = consecutive_minors_upto(&c, q)?;
    rep.stats.lu_fallbacks += levels.iter().map(|l| l.fallbacks).sum::<usize>();
    let mut undecided = false;
    for (j, seq) in levels.iter().enumerate() {
        let last = j + 1 == q;
        for i in 0..seq.len() {
            rep.stats.minors_evaluated += 1;
            let s = classify(seq.values[i], seq.scales[i]);
            let bad = s < 0 || (s == 0 && strict);
            if bad {
                let (rc, cc) = seq.window(i);
                let gamma: Vec<usize> = pena_row_set(m, rc.values(), cc.values())
                    .into_iter()
                    .map(|g| g - 1)
                    .collect();
                let v = det(&xt.select(&gamma, &idx))?;
                rep.witnesses = vec![witness(&idx, &idx, d, swap), witness(&gamma, &idx, v, swap)];
                return Ok(rep);
            }
            if s == 0 && !last {
                undecided = true;
            }
        }
    }
    if undecided {
        return Ok(rep.inconclusive("Peña matrix has dead-zone consecutive minors"));
    }
    rep.holds = true;
    rep.shared_sign = top_sign;
    Ok(rep)
}

/// (Strict) `k`-total positivity from consecutive minors.
///
/// The strict test is exact. The non-strict test is only sufficient; when
/// it cannot decide, all minors up to order `k` are inspected within the
/// compound cap.
pub fn verify_totally_positive(x: &Matrix, k: usize, strict: bool) -> Result<StructureReport> {
    check_order(x, k)?;
    let property = if strict { Property::STP } else { Property::TP };
    let route = if strict {
        Route::ConsecutiveMinors
    } else {
        Route::ConsecutiveSufficient
    };
    let mut rep = StructureReport::new(property, k, route);
    let levels = consecutive_minors_upto(x, k)?;
    rep.stats.lu_fallbacks = levels.iter().map(|l| l.fallbacks).sum();
    let mut undecided = false;
    for (j, seq) in levels.iter().enumerate() {
        let last = j + 1 == k;
        for i in 0..seq.len() {
            rep.stats.minors_evaluated += 1;
            let s = classify(seq.values[i], seq.scales[i]);
            if s < 0 || (s == 0 && strict) {
                rep.witnesses = vec![seq_witness(seq, i, false)];
                return Ok(rep);
            }
            if s == 0 && !last {
                undecided = true;
            }
        }
    }
    if !undecided {
        rep.holds = true;
        rep.shared_sign = 1;
        return Ok(rep);
    }
    let entries: u128 = (1..=k)
        .map(|j| binomial(x.rows(), j) * binomial(x.cols(), j))
        .sum();
    if entries > COMPOUND_CAP {
        return Ok(rep.inconclusive("consecutive test undecided and compound exceeds cap"));
    }
    rep.route = Route::ExhaustiveCompound;
    for j in 1..=k {
        let col_sets: Vec<Vec<usize>> = (0..x.cols()).combinations(j).collect();
        for rs in (0..x.rows()).combinations(j) {
            for cs in &col_sets {
                let v = det(&x.select(&rs, cs))?;
                rep.stats.minors_evaluated += 1;
                if classify(v, hadamard_scale(x, &rs, cs)) < 0 {
                    rep.witnesses = vec![witness(&rs, cs, v, false)];
                    return Ok(rep);
                }
            }
        }
    }
    rep.holds = true;
    rep.shared_sign = 1;
    Ok(rep)
}

/// Any `s` columns of `x` linearly independent (checked subset by subset).
fn columns_independent(x: &Matrix, s: usize) -> Option<bool> {
    if binomial(x.cols(), s) > 100_000 {
        return None;
    }
    let rows: Vec<usize> = (0..x.rows()).collect();
    Some(
        (0..x.cols())
            .combinations(s)
            .all(|cs| rank_estimate(&x.select(&rows, &cs), DEFAULT_RANK_TOL) == s),
    )
}

/// Variation bounding `VB_k` of `x ∈ R^{n×m}` through `SC_{k+1}`.
///
/// Returns an inconclusive report when the reduction's hypotheses fail.
pub fn verify_variation_bounding(x: &Matrix, k: usize) -> Result<StructureReport> {
    let (n, m) = x.shape();
    let max = n.min(m);
    if k + 1 > max {
        return Err(Error::OrderOutOfRange {
            order: k,
            min: 0,
            max: max.saturating_sub(1),
        });
    }
    if k == 0 {
        let sc1 = verify_sign_consistent(x, 1, false)?;
        if sc1.holds {
            let mut rep = StructureReport::new(Property::VB, 0, Route::OneSigned);
            rep.holds = true;
            rep.shared_sign = sc1.shared_sign;
            rep.stats = sc1.stats;
            return Ok(rep);
        }
    }
    let rank = rank_estimate(x, DEFAULT_RANK_TOL);
    let s = k + 1;
    let hypothesis = if s == m && rank == m && n > m {
        Some(true)
    } else if s < rank {
        columns_independent(x, s)
    } else {
        Some(false)
    };
    let base = StructureReport::new(Property::VB, k, Route::Undecidable);
    match hypothesis {
        None => return Ok(base.inconclusive("column independence check too large")),
        Some(false) => {
            return Ok(base.inconclusive(format!(
                "independence/rank hypothesis fails for order {s} (rank {rank})"
            )))
        }
        Some(true) => {}
    }
    let sc = match verify_sign_consistent(x, s, false) {
        Ok(r) => r,
        Err(Error::CompoundTooLarge { .. }) => {
            return Ok(base.inconclusive("sign consistency check exceeds compound cap"))
        }
        Err(e) => return Err(e),
    };
    let mut rep = StructureReport::new(Property::VB, k, Route::ScReduction);
    rep.holds = sc.holds;
    rep.conclusive = sc.conclusive;
    rep.shared_sign = sc.shared_sign;
    rep.witnesses = sc.witnesses;
    rep.stats = sc.stats;
    rep.note = sc.note;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn vandermonde(x: &[f64], n: usize) -> Matrix {
        let rows: Vec<Vec<f64>> = x.iter().map(|&xi| (0..n).map(|k| xi.powi(k as i32)).collect()).collect();
        Matrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn ones_matrix_sc_but_not_ssc() {
        let x = Matrix::from_rows(&[vec![1.0; 3], vec![1.0; 3]]).unwrap();
        let sc = verify_sign_consistent(&x, 2, false).unwrap();
        assert!(sc.holds);
        assert_eq!(sc.shared_sign, 0);
        let ssc = verify_sign_consistent(&x, 2, true).unwrap();
        assert!(!ssc.holds);
        assert_eq!(ssc.witnesses.len(), 1);
    }

    #[test]
    fn vandermonde_is_ssc_and_stp() {
        let v = vandermonde(&[0.17, 0.23, 0.4], 4);
        let r = verify_sign_consistent(&v, 3, true).unwrap();
        assert!(r.holds);
        assert_eq!(r.shared_sign, 1);
        assert_eq!(r.route, Route::ConsecutiveMinors);
        let r = verify_sign_consistent(&v.transpose(), 3, true).unwrap();
        assert!(r.holds);
        let w = vandermonde(&[0.1, 0.2, 0.3, 0.4], 6);
        assert!(verify_totally_positive(&w, 4, true).unwrap().holds);
    }

    #[test]
    fn tp_examples() {
        let i3 = Matrix::identity(3);
        let r = verify_totally_positive(&i3, 3, true).unwrap();
        assert!(!r.holds);
        assert!(r.conclusive);
        let r = verify_totally_positive(&i3, 3, false).unwrap();
        assert!(r.holds);
        assert_eq!(r.route, Route::ExhaustiveCompound);
        let neg = Matrix::from_rows(&[vec![1.0, -2.0], vec![3.0, 4.0]]).unwrap();
        let r = verify_totally_positive(&neg, 1, false).unwrap();
        assert!(!r.holds);
        assert_eq!(r.witnesses[0].value, -2.0);
        assert_eq!(r.witnesses[0].rows.values(), &[1]);
        assert_eq!(r.witnesses[0].cols.values(), &[2]);
    }

    #[test]
    fn pena_small_example() {
        let x = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let c = pena_transform(&x).unwrap();
        assert_eq!(c.shape(), (1, 2));
        assert_relative_eq!(c[(0, 0)], 1.0, epsilon = 1e-15);
        assert_relative_eq!(c[(0, 1)], -1.0, epsilon = 1e-15);
        // C[1,1] ↔ rows (1,3); C[1,2] ↔ rows (2,3)
        assert_eq!(pena_row_set(2, &[1], &[1]), vec![1, 3]);
        assert_eq!(pena_row_set(2, &[1], &[2]), vec![2, 3]);
        assert_eq!(pena_transform(&Matrix::identity(2)).unwrap().rows(), 0);
        assert!(matches!(
            pena_transform(&Matrix::zeros(3, 2)),
            Err(Error::Singular)
        ));
    }

    #[test]
    fn pena_route_used_over_cap() {
        // a unimodular column mix keeps SSC_3 but spoils the leading blocks
        let mix = Matrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![-1.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        let v = vandermonde(&[0.3, 0.5, 0.7], 12).transpose().mul(&mix);
        assert_eq!(verify_sign_consistent(&v, 3, true).unwrap().route, Route::ExhaustiveCompound);
        let r = verify_sign_consistent_with_cap(&v, 3, true, 10).unwrap();
        assert_eq!(r.route, Route::PenaTransform);
        assert!(r.holds);
        assert_eq!(r.shared_sign, 1);
        let mut bad = v.clone();
        bad[(7, 1)] = 3.0;
        let small = verify_sign_consistent_with_cap(&bad, 3, false, 10).unwrap();
        let full = verify_sign_consistent(&bad, 3, false).unwrap();
        assert_eq!(small.holds, full.holds);
        assert!(!full.holds);
        let (a, b) = (small.witnesses[0].value, small.witnesses[1].value);
        assert!(a * b < 0.0);
    }

    #[test]
    fn vb_examples() {
        let ones = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]]).unwrap();
        let r = verify_variation_bounding(&ones, 0).unwrap();
        assert!(r.holds);
        let x = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let r = verify_variation_bounding(&x, 1).unwrap();
        assert_eq!(r.route, Route::ScReduction);
        assert!(!r.holds);
        assert!(r.conclusive);
        let dep = Matrix::from_rows(&[vec![1.0, 1.0, 0.0], vec![1.0, 1.0, 1.0]]).unwrap();
        let r = verify_variation_bounding(&dep, 1).unwrap();
        assert!(!r.conclusive);
        assert_eq!(r.route, Route::Undecidable);
    }
}
