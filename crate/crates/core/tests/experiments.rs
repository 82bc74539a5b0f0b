mod common;

use common::cfg;
use sodtensor::experiments::{
    gen_perturbation, gen_perturbation_with, gen_sod, run_experiment, Basis, ExperimentId,
    ExperimentOptions, ExperimentReport, InstanceSpec, HISTOGRAM_BINS,
};
use sodtensor::SolverConfig;

fn small(instances: usize, seed: u64) -> ExperimentOptions {
    ExperimentOptions {
        instances: Some(instances),
        seed,
        solver: cfg(20, 0),
        ..ExperimentOptions::default()
    }
}

#[test]
fn epsilon_saturates_in_restarts() {
    for seed in 0..4 {
        let base = gen_perturbation(5, 3, seed).unwrap();
        let many = gen_perturbation_with(5, 3, seed, 1.0, &cfg(500, 0)).unwrap();
        assert_eq!(base.tensor, many.tensor);
        let rel = (many.epsilon - base.epsilon) / many.epsilon;
        assert!(
            rel.abs() <= 0.02,
            "seed {seed}: {} vs {}",
            base.epsilon,
            many.epsilon
        );
    }
}

#[test]
fn random_basis_instance() {
    let spec = InstanceSpec {
        n: 4,
        p: 4,
        eigenvalues: vec![4.0, -3.0, 2.0, 1.0],
        basis: Basis::RandomOrthonormal { seed: 17 },
        noise_scale: 0.0,
        seed: 0,
    };
    let (t, truth) = gen_sod(&spec).unwrap();
    for q in &truth {
        assert!((t.apply_full(&q.vector).unwrap() - q.value).abs() <= 1e-12);
    }
    let inst = spec.generate(&SolverConfig::default()).unwrap();
    assert_eq!(inst.observed, t);
    assert_eq!(inst.epsilon(), 0.0);
}

#[test]
fn reports_are_thread_count_independent() {
    let opts = small(6, 99);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_experiment(ExperimentId::E1, &opts).unwrap())
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
}

#[test]
fn experiment_one_and_two_share_instances() {
    let e1 = run_experiment(ExperimentId::E1, &small(4, 3)).unwrap();
    let e2 = run_experiment(ExperimentId::E2, &small(4, 3)).unwrap();
    for (a, b) in e1.records.iter().zip(&e2.records) {
        assert_eq!(a.seed, b.seed);
        assert_eq!(a.epsilon, b.epsilon);
    }
    let s = e1.summary.e1.as_ref().unwrap();
    assert_eq!(s.eigenvalue_histogram.counts.len(), HISTOGRAM_BINS);
    assert_eq!(s.within_bound, 4);
    let s2 = e2.summary.e2.as_ref().unwrap();
    assert_eq!(s2.observed_half_better, 4);
    for r in &e2.records {
        let m = r.e2.as_ref().unwrap();
        assert_eq!(m.difference, m.metric_zero - m.metric_half);
    }
}

#[test]
fn report_json_round_trip_and_csv() {
    let r = run_experiment(ExperimentId::E2, &small(3, 1)).unwrap();
    let back = ExperimentReport::from_json(&r.to_json().unwrap()).unwrap();
    assert_eq!(back, r);
    let js: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    assert_eq!(js["experiment_id"], "E2");
    assert_eq!(js["records"].as_array().unwrap().len(), 3);
    for rec in js["records"].as_array().unwrap() {
        assert!(rec["seed"].is_u64());
        assert!(rec["epsilon"].is_f64());
        assert!(rec["e2"]["metric_half"].is_f64());
    }
    let mut csv = Vec::new();
    r.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("index,seed,epsilon,metric_half"));
    assert_eq!(lines[1].split(',').count(), 8);
}

#[test]
fn experiment_three_listing() {
    let r = run_experiment(ExperimentId::E3, &ExperimentOptions::default()).unwrap();
    assert_eq!(r.records.len(), 1);
    let e3 = r.records[0].e3.as_ref().unwrap();
    let half: Vec<f64> = e3.half.values();
    assert!((half[0] - 1000.0).abs() < 0.005);
    for v in &half[1..] {
        assert!((v - 189.95).abs() < 0.005, "{v}");
    }
    for v in e3.twentieth.values().iter().skip(1) {
        assert!((v - 100.0).abs() < 1e-6);
    }
    let mut csv = Vec::new();
    r.write_csv(&mut csv).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 11);
}

#[test]
fn sweep_covers_grid() {
    let mut opts = small(2, 4);
    opts.sweep.dims = vec![2, 4];
    opts.sweep.scales = vec![1.0, 30.0];
    let r = run_experiment(ExperimentId::Sweep, &opts).unwrap();
    assert_eq!(r.records.len(), 8);
    let cells = r.summary.sweep.as_ref().unwrap();
    assert_eq!(cells.len(), 4);
    assert!(cells.iter().all(|c| c.count == 2));
    // Large noise leaves the residual-deflation regime and is flagged.
    assert!(cells
        .iter()
        .filter(|c| c.noise_scale == 30.0)
        .all(|c| c.admissible == 0));
}

#[test]
fn invalid_options_rejected() {
    assert!(run_experiment(ExperimentId::E1, &small(0, 0)).is_err());
    let mut o = small(1, 0);
    o.noise_scale = -1.0;
    assert!(run_experiment(ExperimentId::E1, &o).is_err());
}
