use sodtensor::experiments::{run_experiment, ExperimentId, ExperimentOptions};
use sodtensor::Result;

fn main() -> Result<()> {
    // noisy diagonal-300 tensors, theta = 1/2
    let opts = ExperimentOptions {
        instances: Some(100),
        seed: 1,
        ..ExperimentOptions::default()
    };
    let r = run_experiment(ExperimentId::E1, &opts)?;
    let s = r.summary.e1.as_ref().expect("experiment 1 summary");
    println!(
        "{} instances: max eigenvalue stat {:.3}, max eigenvector stat {:.3}, {} within bound",
        r.instances, s.max_eigenvalue_stat, s.max_eigenvector_stat, s.within_bound
    );

    // text histogram of the normalized eigenvalue errors
    let h = &s.eigenvalue_histogram;
    for (b, &count) in h.counts.iter().enumerate().filter(|(_, &c)| c > 0) {
        let (lo, hi) = h.edges(b);
        println!("[{lo:.3}, {hi:.3}) {}", "#".repeat(count));
    }
    if h.overflow > 0 {
        println!(">= {:.2}: {}", h.max, h.overflow);
    }
    Ok(())
}
