use super::report::{SequenceKind, SequenceReport};
use crate::error::{Error, Result};

/// `a_{k+1}² ≥ a_k a_{k+2} − tol` for all `k`, `tol = 1e−12·max(a)²`.
pub fn is_log_concave(a: &[f64]) -> Result<SequenceReport> {
    if let Some((i, &v)) = a.iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeEntry { index: i + 1, value: v });
    }
    let max = a.iter().cloned().fold(0.0, f64::max);
    let tol = 1e-12 * max * max;
    let violation = a
        .windows(3)
        .position(|w| w[1] * w[1] < w[0] * w[2] - tol)
        .map(|k| k + 1);
    Ok(SequenceReport {
        kind: SequenceKind::LogConcave,
        holds: violation.is_none(),
        peak_index: None,
        violation_index: violation,
    })
}

/// Single-peak test: differences change sign at most once, from + to −.
///
/// Differences within `1e−12·max|a|` count as zero.
pub fn is_unimodal(a: &[f64]) -> SequenceReport {
    let max_abs = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-12 * max_abs;
    let mut descending = false;
    let mut violation = None;
    for (k, w) in a.windows(2).enumerate() {
        let d = w[1] - w[0];
        if d < -tol {
            descending = true;
        } else if d > tol && descending {
            violation = Some(k + 1);
            break;
        }
    }
    let peak = if violation.is_none() && !a.is_empty() {
        let m = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        a.iter().position(|&v| v == m).map(|i| i + 1)
    } else {
        None
    };
    SequenceReport {
        kind: SequenceKind::Unimodal,
        holds: violation.is_none(),
        peak_index: peak,
        violation_index: violation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_concave_examples() {
        assert!(is_log_concave(&[1.0, 2.0, 4.0, 2.0, 1.0]).unwrap().holds);
        let r = is_log_concave(&[1.0, 1.0, 3.0]).unwrap();
        assert!(!r.holds);
        assert_eq!(r.violation_index, Some(1));
        assert!(matches!(
            is_log_concave(&[1.0, -1.0]),
            Err(Error::NegativeEntry { index: 2, .. })
        ));
    }

    #[test]
    fn unimodal_examples() {
        let r = is_unimodal(&[1.0, 3.0, 2.0]);
        assert!(r.holds);
        assert_eq!(r.peak_index, Some(2));
        let r = is_unimodal(&[1.0, 0.0, 1.0]);
        assert!(!r.holds);
        assert_eq!(r.violation_index, Some(2));
        assert!(is_unimodal(&[2.0, 2.0, 2.0]).holds);
        assert_eq!(is_unimodal(&[1.0, 3.0, 3.0, 1.0]).peak_index, Some(2));
    }
}
