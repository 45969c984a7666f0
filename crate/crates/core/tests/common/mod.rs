#![allow(dead_code)]

use bpfail_core::generators::{ctrb, LtiSystem};
use bpfail_core::linalg::{det, Lu, Matrix};
use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 100,
        rng_seed: RngSeed::Fixed(0x0b5e_55ed),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// Entries drawn uniformly from `[-1, 1]`.
pub fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(-1.0..=1.0f64, rows * cols)
        .prop_map(move |data| Matrix::new(rows, cols, data).unwrap())
}

/// Sorted nodes as a strategy.
pub fn nodes(m: usize) -> impl Strategy<Value = Vec<f64>> {
    any::<u64>().prop_map(move |seed| sorted_nodes(&mut rng(seed), m))
}

/// All `k`-minors by nalgebra determinants, independent of the crate's code.
pub fn all_minors(x: &Matrix, k: usize) -> Vec<(Vec<usize>, Vec<usize>, f64)> {
    use itertools::Itertools;
    let mut out = Vec::new();
    for rs in (0..x.rows()).combinations(k) {
        for cs in (0..x.cols()).combinations(k) {
            let d = DMatrix::from_fn(k, k, |i, j| x[(rs[i], cs[j])]).determinant();
            out.push((rs.clone(), cs, d));
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Matrix::new(rows, cols, data).unwrap()
}

/// Sorted nodes in (0, 1] with pairwise gaps of at least 0.02.
pub fn sorted_nodes(rng: &mut impl Rng, m: usize) -> Vec<f64> {
    loop {
        let mut x: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..=1.0)).collect();
        x.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if x.windows(2).all(|w| w[1] - w[0] >= 0.02) {
            return x;
        }
    }
}

/// Eigenvalues as `(re, im)` pairs.
pub fn eigenvalues(a: &Matrix) -> Vec<(f64, f64)> {
    let m = DMatrix::from_row_slice(a.rows(), a.cols(), a.as_slice());
    m.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect()
}

pub fn invertible(rng: &mut impl Rng, m: usize) -> Matrix {
    loop {
        let s = uniform_matrix(rng, m, m);
        if det(&s).unwrap().abs() > 0.05 {
            return s;
        }
    }
}

fn similar(rng: &mut impl Rng, d: &Matrix) -> Matrix {
    let s = invertible(rng, d.rows());
    s.mul(d).mul(&Lu::factor(&s).unwrap().inverse().unwrap())
}

/// Mix of spectra: nonnegative, signed, complex and unstructured.
pub fn random_system_matrix(rng: &mut impl Rng, m: usize, case: usize) -> Matrix {
    match case % 4 {
        0 => {
            let x: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
            similar(rng, &Matrix::diag(&x))
        }
        1 => {
            let x: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            similar(rng, &Matrix::diag(&x))
        }
        2 => {
            let mut d = Matrix::diag(&(0..m).map(|_| rng.gen_range(0.0..1.0)).collect::<Vec<_>>());
            let (re, im) = (rng.gen_range(-0.5..0.9), rng.gen_range(0.05..0.5));
            d[(0, 0)] = re;
            d[(1, 1)] = re;
            d[(0, 1)] = im;
            d[(1, 0)] = -im;
            similar(rng, &d)
        }
        _ => uniform_matrix(rng, m, m),
    }
}

/// Random full-rank 5×3 matrix; sign consistent by construction when asked.
pub fn five_by_three(rng: &mut impl Rng, consistent: bool) -> Matrix {
    if !consistent {
        return uniform_matrix(rng, 5, 3);
    }
    let x = sorted_nodes(rng, 3);
    let v = ctrb(&LtiSystem::diagonal(&x).unwrap(), 5).unwrap().transpose();
    let d = Matrix::diag(&(0..5).map(|_| rng.gen_range(0.2..2.0)).collect::<Vec<_>>());
    d.mul(&v).mul(&invertible(rng, 3))
}
