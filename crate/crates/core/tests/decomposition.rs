mod common;

use common::{cfg, sod};
use proptest::prelude::*;
use sodtensor::bounds::{verify, CheckOptions, Theorem};
use sodtensor::decomposition::sroa_rd_trace;
use sodtensor::experiments::{gen_perturbation, random_orthonormal};
use sodtensor::{
    ada_sroa_cd, exhaustive_match, match_components, sroa_cd, sroa_rd, EigenPair, SymmetricTensor,
    UnitVector,
};

/// All `n!·2^n` signed alignments; smallest maximum vector error.
fn signed_alignment_oracle(truth: &[EigenPair], est: &[EigenPair]) -> f64 {
    fn rec(
        truth: &[EigenPair],
        est: &[EigenPair],
        j: usize,
        used: &mut Vec<bool>,
        cur: f64,
        best: &mut f64,
    ) {
        if j == est.len() {
            *best = best.min(cur);
            return;
        }
        for i in 0..truth.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            for s in [1.0, -1.0] {
                let err: f64 = truth[i]
                    .vector
                    .iter()
                    .zip(est[j].vector.iter())
                    .map(|(a, b)| (a - s * b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                rec(truth, est, j + 1, used, cur.max(err), best);
            }
            used[i] = false;
        }
    }
    let mut best = f64::INFINITY;
    rec(truth, est, 0, &mut vec![false; truth.len()], 0.0, &mut best);
    best
}

fn diagonal(n: usize, lambda: f64) -> (SymmetricTensor, Vec<EigenPair>) {
    let truth: Vec<EigenPair> = (0..n)
        .map(|i| EigenPair::new(lambda, UnitVector::basis(n, i)).unwrap())
        .collect();
    let t = SymmetricTensor::from_pairs(3, n, truth.iter().map(|q| (q.value, &q.vector))).unwrap();
    (t, truth)
}

#[test]
fn exact_recovery_all_methods() {
    for case in 0..6u64 {
        let n = 3 + (case % 3) as usize;
        let p = 3 + (case % 2) as usize;
        let values: Vec<f64> = (0..n)
            .map(|i| 10.0 - 2.0 * i as f64 - 0.3 * case as f64)
            .collect();
        let (t, truth) = sod(n, p, &values, 100 + case);
        let kappa = values.iter().cloned().fold(0.0, f64::max)
            / values.iter().cloned().fold(f64::INFINITY, f64::min);
        for d in [
            sroa_rd(&t, &cfg(30, case)).unwrap(),
            sroa_cd(&t, 1.0 / (2.0 * kappa), &cfg(30, case)).unwrap(),
            ada_sroa_cd(&t, &cfg(30, case)).unwrap(),
        ] {
            let m = match_components(&truth, &d.pairs).unwrap();
            assert!(m.max_vector_error() <= 1e-6, "case {case}: {m:?}");
            assert!(m.max_value_error() <= 1e-6, "case {case}: {m:?}");
        }
    }
}

#[test]
fn residual_deflation_telescopes() {
    let (t, _) = diagonal(5, 300.0);
    let e = gen_perturbation(5, 3, 7).unwrap();
    let noisy = t.add(&e.tensor).unwrap();
    let (d, iterates) = sroa_rd_trace(&noisy, &cfg(20, 3)).unwrap();
    let mut partial = noisy.clone();
    for (k, pair) in d.pairs.iter().enumerate() {
        let subtracted = SymmetricTensor::rank_one(pair.value, &pair.vector, 3).unwrap();
        partial = partial.sub(&subtracted).unwrap();
        let gap = partial.sub(&iterates[k]).unwrap().frobenius_norm();
        assert!(gap <= 1e-10, "step {k}: {gap}");
    }
    assert!((d.residual - iterates[4].frobenius_norm()).abs() <= 1e-12);
}

#[test]
fn adaptive_on_dominant_component() {
    let mut values = [100.0; 5];
    values[0] = 1000.0;
    let truth: Vec<EigenPair> = (0..5)
        .map(|i| EigenPair::new(values[i], UnitVector::basis(5, i)).unwrap())
        .collect();
    let t = SymmetricTensor::from_pairs(3, 5, truth.iter().map(|q| (q.value, &q.vector))).unwrap();
    let d = ada_sroa_cd(&t, &cfg(30, 9)).unwrap();
    let th = d.thetas.as_ref().unwrap();
    assert_eq!(th[0], 0.5);
    assert!(th.windows(2).all(|w| w[1] <= w[0]));
    assert!(*th.last().unwrap() > 0.048);
    let m = match_components(&truth, &d.pairs).unwrap();
    assert!(m.max_vector_error() <= 1e-6 && m.max_value_error() <= 1e-6);
    let r = verify(Theorem::Ada, 3, &truth, &d, 0.0, CheckOptions::default()).unwrap();
    assert!(r.bounds_hold() && r.theta_chain.unwrap().ok());
}

#[test]
fn clean_diagonal_keeps_half() {
    let (t, truth) = diagonal(4, 300.0);
    let d = ada_sroa_cd(&t, &cfg(20, 0)).unwrap();
    assert!(d.thetas.unwrap().iter().all(|&x| x == 0.5));
    let m = match_components(&truth, &d.pairs).unwrap();
    assert!(m.max_vector_error() <= 1e-9);
}

#[test]
fn greedy_matching_is_optimal_on_noisy_runs() {
    let (t, truth) = diagonal(5, 300.0);
    for seed in 0..6 {
        let e = gen_perturbation(5, 3, seed).unwrap();
        let noisy = t.add(&e.tensor.scaled(5.0)).unwrap();
        let d = sroa_cd(&noisy, 0.5, &cfg(20, seed)).unwrap();
        let greedy = match_components(&truth, &d.pairs).unwrap();
        let exhaustive = exhaustive_match(&truth, &d.pairs).unwrap();
        let oracle = signed_alignment_oracle(&truth, &d.pairs);
        assert!((greedy.max_vector_error() - oracle).abs() <= 1e-12);
        assert!((exhaustive.max_vector_error() - oracle).abs() <= 1e-12);
    }
}

#[test]
fn residual_deflation_bounds_on_noisy_diagonal() {
    let (t, truth) = diagonal(5, 300.0);
    for seed in 0..5 {
        let e = gen_perturbation(5, 3, 40 + seed).unwrap();
        let d = sroa_rd(&t.add(&e.tensor).unwrap(), &cfg(30, seed)).unwrap();
        let r = verify(
            Theorem::Rd,
            3,
            &truth,
            &d,
            e.epsilon,
            CheckOptions::default(),
        )
        .unwrap();
        assert!(r.admissible && r.heuristic);
        assert!(r.bounds_hold(), "{r:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn matching_agrees_with_signed_oracle(
        seed in any::<u64>(),
        n in 2usize..=5,
        noise in prop::collection::vec(-0.3f64..0.3, 25),
        perm_seed in any::<u64>(),
    ) {
        let basis = random_orthonormal(n, seed).unwrap();
        let truth: Vec<EigenPair> = basis
            .iter()
            .map(|v| EigenPair::new(1.0, v.clone()).unwrap())
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.rotate_left((perm_seed % n as u64) as usize);
        let est: Vec<EigenPair> = order
            .iter()
            .enumerate()
            .map(|(j, &i)| {
                let sign = if (perm_seed >> j) & 1 == 1 { -1.0 } else { 1.0 };
                let v: Vec<f64> = basis[i].iter().zip(&noise[j * 5..j * 5 + n]).map(|(a, e)| sign * a + e).collect();
                EigenPair::new(1.0, UnitVector::normalize(v).unwrap()).unwrap()
            })
            .collect();
        let oracle = signed_alignment_oracle(&truth, &est);
        let exhaustive = exhaustive_match(&truth, &est).unwrap();
        prop_assert!((exhaustive.max_vector_error() - oracle).abs() <= 1e-12);
        let greedy = match_components(&truth, &est).unwrap();
        prop_assert!(greedy.max_vector_error() >= oracle - 1e-12);
    }
}
