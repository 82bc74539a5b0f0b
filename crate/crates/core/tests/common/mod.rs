#![allow(dead_code)]

use proptest::prelude::*;
use sodtensor::experiments::random_orthonormal;
use sodtensor::{EigenPair, SolverConfig, SymmetricTensor, UnitVector};

/// `(order, dim, raw entries)` with `dim^order ≤ 256`.
pub fn raw_tensor() -> impl Strategy<Value = (usize, usize, Vec<f64>)> {
    (2usize..=4, 1usize..=4)
        .prop_filter("size", |(p, n)| n.pow(*p as u32) <= 256)
        .prop_flat_map(|(p, n)| {
            let len = n.pow(p as u32);
            (Just(p), Just(n), prop::collection::vec(-10.0f64..10.0, len))
        })
}

pub fn symmetric_tensor() -> impl Strategy<Value = SymmetricTensor> {
    raw_tensor().prop_map(|(p, n, raw)| SymmetricTensor::symmetrize(&raw, p, n).unwrap())
}

/// Nonzero direction of length `n`.
pub fn direction(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
}

pub fn sod(n: usize, p: usize, values: &[f64], seed: u64) -> (SymmetricTensor, Vec<EigenPair>) {
    let basis = random_orthonormal(n, seed).unwrap();
    let truth: Vec<EigenPair> = values
        .iter()
        .zip(basis)
        .map(|(&l, v)| EigenPair::new(l, v).unwrap())
        .collect();
    let t = SymmetricTensor::from_pairs(p, n, truth.iter().map(|q| (q.value, &q.vector))).unwrap();
    (t, truth)
}

pub fn unit(v: Vec<f64>) -> UnitVector {
    UnitVector::normalize(v).unwrap()
}

pub fn cfg(restarts: usize, seed: u64) -> SolverConfig {
    SolverConfig {
        restarts,
        seed,
        ..SolverConfig::default()
    }
}
