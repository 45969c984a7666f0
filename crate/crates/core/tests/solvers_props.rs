mod common;

use bpfail_core::certify::column_coherence;
use bpfail_core::solvers::{
    solve_bp, solve_bp_with, solve_l0, BpOptions, SolveStatus, DEFAULT_FEAS_TOL, DEFAULT_RES_TOL,
};
use bpfail_core::Matrix;
use common::{config, matrix};
use proptest::prelude::*;

fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

fn sparse(values: &[f64], mask: u16) -> Vec<f64> {
    values
        .iter()
        .enumerate()
        .map(|(i, x)| if mask >> i & 1 == 1 { *x } else { 0.0 })
        .collect()
}

fn normalize_columns(v: &Matrix) -> Matrix {
    let cols: Vec<Vec<f64>> = (0..v.cols())
        .map(|j| {
            let c = v.column(j);
            let n = v.column_norm(j);
            c.iter().map(|x| x / n).collect()
        })
        .collect();
    Matrix::from_columns(&cols).unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn l1_and_l0_sandwich(
        v in matrix(3, 6),
        u in proptest::collection::vec(prop_oneof![-2.0..-0.2f64, 0.2..2.0f64], 6),
        mask in 1u16..64,
    ) {
        let u = sparse(&u, mask);
        let y = v.mul_vec(&u);
        let bp = solve_bp(&v, &y, DEFAULT_FEAS_TOL).unwrap();
        prop_assert_eq!(bp.status, SolveStatus::Optimal);
        let l0 = solve_l0(&v, &y, 6, DEFAULT_RES_TOL).unwrap();
        let s = l0.min_cardinality.unwrap();
        prop_assert!(s <= u.iter().filter(|x| **x != 0.0).count());
        prop_assert!(s <= bp.support.len());
        prop_assert!(bp.objective <= norm1(&u) * (1.0 + 1e-7));
        for sol in &l0.solutions_found {
            prop_assert!(bp.objective <= norm1(&sol.u) * (1.0 + 1e-7));
        }
    }

    #[test]
    fn planted_recovery_under_coherence(
        v in matrix(4, 8),
        u in proptest::collection::vec(prop_oneof![-2.0..-0.2f64, 0.2..2.0f64], 8),
        mask in 0u16..256,
    ) {
        let v = normalize_columns(&v);
        let mu = column_coherence(&v).unwrap();
        let planted = sparse(&u, mask.max(1));
        let k = planted.iter().filter(|x| **x != 0.0).count();
        // exact recovery of every k-sparse vector when k < (1 + 1/μ) / 2
        let guaranteed = (2 * k) as f64 - 1.0 < 1.0 / mu;
        let one = {
            let mut e = vec![0.0; 8];
            let j = mask.trailing_zeros() as usize % 8;
            e[j] = u[j];
            e
        };
        let u = if guaranteed { planted } else { one };
        let y = v.mul_vec(&u);
        let bp = solve_bp(&v, &y, DEFAULT_FEAS_TOL).unwrap();
        prop_assert_eq!(bp.status, SolveStatus::Optimal);
        let err = bp.u.iter().zip(&u).fold(0.0f64, |w, (a, b)| w.max((a - b).abs()));
        prop_assert!(err <= 1e-7, "mu {mu}, error {err}");
    }

    #[test]
    fn solvers_are_deterministic(v in matrix(3, 7), u in proptest::collection::vec(-1.0..1.0f64, 7)) {
        let y = v.mul_vec(&u);
        let a = solve_bp_with(&v, &y, &BpOptions::default()).unwrap();
        let b = solve_bp_with(&v, &y, &BpOptions::default()).unwrap();
        prop_assert_eq!(
            a.solution.u.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            b.solution.u.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
        prop_assert_eq!(a.dual.beta, b.dual.beta);
        prop_assert_eq!(a.iterations, b.iterations);
        let l = solve_l0(&v, &y, 3, DEFAULT_RES_TOL).unwrap();
        let r = solve_l0(&v, &y, 3, DEFAULT_RES_TOL).unwrap();
        prop_assert_eq!(l.min_cardinality, r.min_cardinality);
        prop_assert_eq!(l.supports_tested, r.supports_tested);
    }
}
