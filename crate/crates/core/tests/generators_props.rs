mod common;

use std::collections::BTreeMap;

use bpfail_core::generators::{bernstein_sample, ctrb, fuel_instance, hankel, obsv, LtiSystem};
use bpfail_core::io::{read_instance, write_json, InstanceFile};
use bpfail_core::structure::verify_sign_consistent;
use bpfail_core::Matrix;
use common::{config, invertible, nodes, rng};
use proptest::prelude::*;
use rand::Rng;

/// Stable system with a real spectrum in `(-0.9, 0.9)`, similarity transformed.
fn stable_system(seed: u64, m: usize) -> LtiSystem {
    let mut rng = rng(seed);
    let d = Matrix::diag(&(0..m).map(|_| rng.gen_range(-0.9..0.9)).collect::<Vec<_>>());
    let s = invertible(&mut rng, m);
    let inv = bpfail_core::linalg::Lu::factor(&s).unwrap().inverse().unwrap();
    let b = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let c = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    LtiSystem::new(s.mul(&d).mul(&inv), b, Some(c)).unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn hankel_factors_through_observability(seed in any::<u64>(), m in 1usize..=4, rows in 1usize..=6, cols in 1usize..=10) {
        let sys = stable_system(seed, m);
        let h = hankel(&sys, rows, cols).unwrap();
        let oc = obsv(&sys, rows).unwrap().mul(&ctrb(&sys, cols).unwrap());
        prop_assert_eq!(h.shape(), (rows, cols));
        let g = sys.impulse_response(rows + cols).unwrap();
        for i in 0..rows {
            for j in 0..cols {
                prop_assert!((h[(i, j)] - oc[(i, j)]).abs() <= 1e-12 * oc.max_abs().max(1.0));
                prop_assert!((h[(i, j)] - g[i + j]).abs() <= 1e-12 * oc.max_abs().max(1.0));
            }
        }
    }

    #[test]
    fn positive_vandermonde_is_strictly_sign_consistent(x in (1usize..=4).prop_flat_map(nodes), n in 5usize..=12) {
        let v = ctrb(&LtiSystem::diagonal(&x).unwrap(), n).unwrap();
        let rep = verify_sign_consistent(&v.transpose(), x.len(), true).unwrap();
        prop_assert!(rep.holds && rep.conclusive);
        prop_assert_eq!(rep.shared_sign, 1);
    }

    #[test]
    fn fuel_instance_steers_to_origin_and_round_trips(
        x in (2usize..=4).prop_flat_map(nodes),
        horizon in 4usize..=12,
        times in proptest::collection::btree_map(0usize..4, -2.0..2.0f64, 1..3),
    ) {
        let sys = LtiSystem::diagonal(&x).unwrap();
        let times: BTreeMap<usize, f64> = times;
        let inst = fuel_instance(&sys, horizon, &times).unwrap();
        let end = inst.simulate();
        let scale = inst.xi.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        prop_assert!(end.iter().all(|v| v.abs() <= 1e-9 * scale));
        let v = inst.matrix().unwrap();
        let vy = v.mul_vec(&inst.stacked_u());
        for (a, b) in vy.iter().zip(&inst.y) {
            prop_assert!((a - b).abs() <= 1e-9 * scale);
        }

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("instance.json");
        write_json(&path, &InstanceFile::from_fuel(&inst)).unwrap();
        let back = read_instance(&path).unwrap().to_fuel().unwrap();
        prop_assert_eq!(back.xi, inst.xi);
        prop_assert_eq!(back.y, inst.y);
        prop_assert_eq!(back.u_true, inst.u_true);
    }

    #[test]
    fn bernstein_is_a_partition_of_unity(
        degree in 1usize..=15,
        points in proptest::collection::vec(0.0..=1.0f64, 1..8),
    ) {
        let v = bernstein_sample(degree, &points).unwrap();
        prop_assert_eq!(v.shape(), (points.len(), degree + 1));
        for i in 0..v.rows() {
            prop_assert!(v.row(i).iter().all(|&b| b >= 0.0));
            prop_assert!((v.row(i).iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }
}

#[test]
fn bernstein_rejects_points_outside_the_interval() {
    assert!(bernstein_sample(3, &[0.5, 1.5]).is_err());
}
