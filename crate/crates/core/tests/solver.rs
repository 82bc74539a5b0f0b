mod common;

use common::{cfg, direction, unit};
use proptest::prelude::*;
use sodtensor::solver::ACTIVE_TOL;
use sodtensor::{
    best_rank_one, brute_force_rank_one, constrained_rank_one, sroa_cd, ConstraintSet,
    SymmetricTensor,
};

fn small_tensor() -> impl Strategy<Value = SymmetricTensor> {
    (2usize..=3, 2usize..=4).prop_flat_map(|(n, p)| {
        prop::collection::vec(-5.0f64..5.0, n.pow(p as u32))
            .prop_map(move |raw| SymmetricTensor::symmetrize(&raw, p, n).unwrap())
    })
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn unconstrained_matches_oracle(t in small_tensor(), seed in any::<u64>()) {
        let sol = best_rank_one(&t, &cfg(30, seed)).unwrap();
        let oracle = brute_force_rank_one(&t, &ConstraintSet::unconstrained(), 400).unwrap();
        let (a, b) = (sol.pair.value.abs(), oracle.value.abs());
        prop_assert!(a >= b - 1e-5 * (1.0 + b), "solver {} oracle {}", a, b);
        prop_assert!(b >= a - 1e-5 * (1.0 + a), "oracle {} solver {}", b, a);
    }

    #[test]
    fn constrained_is_feasible_and_matches_oracle(
        t in small_tensor(),
        anchor in direction(3),
        theta in 0.05f64..0.95,
        seed in any::<u64>(),
    ) {
        let n = t.dim();
        if anchor[..n].iter().map(|x| x * x).sum::<f64>() < 1e-3 {
            return Ok(());
        }
        let cs = ConstraintSet::new(vec![unit(anchor[..n].to_vec())], theta).unwrap();
        let sol = constrained_rank_one(&t, &cs, &cfg(30, seed)).unwrap();
        prop_assert!(cs.is_feasible(&sol.pair.vector, 1e-9));
        let oracle = brute_force_rank_one(&t, &cs, 400).unwrap();
        let (a, b) = (sol.pair.value.abs(), oracle.value.abs());
        prop_assert!(a >= b - 1e-5 * (1.0 + b), "solver {} oracle {}", a, b);
        prop_assert!(b >= a - 1e-5 * (1.0 + a), "oracle {} solver {}", b, a);
        for &k in &sol.certificate.active_constraints {
            let overlap = cs.anchors()[k].dot(&sol.pair.vector).abs();
            prop_assert!((overlap - theta).abs() <= ACTIVE_TOL);
        }
    }

    #[test]
    fn constrained_deflation_respects_slabs(t in small_tensor(), theta in 0.0f64..1.0, seed in any::<u64>()) {
        let d = sroa_cd(&t, theta, &cfg(10, seed)).unwrap();
        for k in 0..d.len() {
            for i in 0..k {
                let overlap = d.pairs[k].vector.dot(&d.pairs[i].vector).abs();
                prop_assert!(overlap <= theta + 1e-9, "step {} vs {}: {}", k, i, overlap);
            }
        }
    }
}

#[test]
fn deterministic_across_thread_counts() {
    let raw: Vec<f64> = (0..125)
        .map(|i| ((i * 53 % 97) as f64 - 48.0) / 9.0)
        .collect();
    let t = SymmetricTensor::symmetrize(&raw, 3, 5).unwrap();
    let c = cfg(40, 1234);
    let one = in_pool(1, || best_rank_one(&t, &c).unwrap());
    let four = in_pool(4, || best_rank_one(&t, &c).unwrap());
    assert_eq!(one, four);
    let cs = ConstraintSet::new(vec![one.pair.vector.clone()], 0.3).unwrap();
    let one = in_pool(1, || constrained_rank_one(&t, &cs, &c).unwrap());
    let four = in_pool(4, || constrained_rank_one(&t, &cs, &c).unwrap());
    assert_eq!(one, four);
    let one = in_pool(1, || sroa_cd(&t, 0.5, &c).unwrap());
    let four = in_pool(4, || sroa_cd(&t, 0.5, &c).unwrap());
    assert_eq!(one, four);
}

#[test]
fn seed_changes_restarts_not_optimum() {
    let raw: Vec<f64> = (0..27).map(|i| ((i * 7 % 13) as f64 - 6.0) / 2.0).collect();
    let t = SymmetricTensor::symmetrize(&raw, 3, 3).unwrap();
    let a = best_rank_one(&t, &cfg(50, 1)).unwrap();
    let b = best_rank_one(&t, &cfg(50, 2)).unwrap();
    assert!((a.pair.value - b.pair.value).abs() <= 1e-9);
    assert!(a.certificate.converged && b.certificate.converged);
}
