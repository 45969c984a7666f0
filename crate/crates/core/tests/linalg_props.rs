mod common;

use bpfail_core::linalg::{
    compound, consecutive_minors, det, hadamard_scale, leading_block_coeffs, minor, rank_estimate,
    variation, Matrix, DEFAULT_RANK_TOL,
};
use common::{config, matrix};
use proptest::prelude::*;

fn max_rel_diff(a: &Matrix, b: &Matrix) -> f64 {
    let scale = a.max_abs().max(b.max_abs()).max(1.0);
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .fold(0.0, |w, (x, y)| w.max((x - y).abs() / scale))
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn compound_is_multiplicative(x in matrix(3, 5), y in matrix(5, 4), r in 1usize..=3) {
        let lhs = compound(&x.mul(&y), r).unwrap();
        let rhs = compound(&x, r).unwrap().mul(&compound(&y, r).unwrap());
        prop_assert!(max_rel_diff(&lhs, &rhs) <= 1e-9);
    }

    #[test]
    fn compound_commutes_with_transpose(x in matrix(4, 5), r in 1usize..=4) {
        let a = compound(&x.transpose(), r).unwrap();
        let b = compound(&x, r).unwrap().transpose();
        prop_assert!(max_rel_diff(&a, &b) <= 1e-12);
    }

    #[test]
    fn full_rank_compound_is_nonzero(x in matrix(3, 6)) {
        prop_assume!(rank_estimate(&x, DEFAULT_RANK_TOL) == 3);
        let c = compound(&x, 3).unwrap();
        prop_assert_eq!(c.shape(), (1, 20));
        prop_assert!(c.max_abs() > 0.0);
        // a rank-deficient product has a vanishing top compound
        let low = x.leading_columns(2).mul(&x.block(0, 0, 2, 6));
        prop_assert!(compound(&low, 3).unwrap().max_abs() <= 1e-12);
    }

    #[test]
    fn determinant_is_multiplicative(x in matrix(4, 4), y in matrix(4, 4)) {
        let lhs = det(&x.mul(&y)).unwrap();
        let rhs = det(&x).unwrap() * det(&y).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn condensation_matches_lu(x in matrix(4, 7), j in 1usize..=4) {
        let seq = consecutive_minors(&x, j).unwrap();
        for i in 0..seq.len() {
            let (rs, cs) = seq.window(i);
            let lu = minor(&x, &rs, &cs).unwrap();
            let scale = hadamard_scale(&x, &rs.zero_based(), &cs.zero_based());
            prop_assert!((seq.values[i] - lu).abs() <= 1e-9 * scale.max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn variation_invariances(
        u in proptest::collection::vec(-1.0..=1.0f64, 1..20),
        alpha in prop_oneof![-5.0..-0.1f64, 0.1..5.0f64],
        at in 0usize..20,
    ) {
        let v = variation(&u);
        prop_assert!(v >= 0 && v < u.len() as i64);
        let scaled: Vec<f64> = u.iter().map(|x| alpha * x).collect();
        prop_assert_eq!(variation(&scaled), v);
        let mut padded = u.clone();
        padded.insert(at.min(u.len()), 0.0);
        prop_assert_eq!(variation(&padded), v);
        let reversed: Vec<f64> = u.iter().rev().copied().collect();
        prop_assert_eq!(variation(&reversed), v);
    }

    #[test]
    fn leading_block_reproduces_columns(b in matrix(4, 3), c in matrix(3, 5), k in 4usize..=8) {
        prop_assume!(det(&b.transpose().mul(&b)).unwrap() > 1e-3);
        let v = b.mul(&hstack(&Matrix::identity(3), &c));
        let coeffs = leading_block_coeffs(&v, 3, k).unwrap();
        let recon = v.leading_columns(3).mul_vec(&coeffs);
        let col = v.column(k - 1);
        let err = recon.iter().zip(&col).fold(0.0f64, |w, (a, b)| w.max((a - b).abs()));
        prop_assert!(err <= 1e-9 * v.max_abs().max(1.0));
        for (got, want) in coeffs.iter().zip(c.column(k - 4)) {
            prop_assert!((got - want).abs() <= 1e-6);
        }
    }
}

fn hstack(a: &Matrix, b: &Matrix) -> Matrix {
    let mut cols: Vec<Vec<f64>> = (0..a.cols()).map(|j| a.column(j)).collect();
    cols.extend((0..b.cols()).map(|j| b.column(j)));
    Matrix::from_columns(&cols).unwrap()
}
