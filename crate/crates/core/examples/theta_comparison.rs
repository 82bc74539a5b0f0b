use sodtensor::experiments::{run_experiment, ExperimentId, ExperimentOptions};
use sodtensor::Result;

fn main() -> Result<()> {
    let opts = ExperimentOptions {
        instances: Some(100),
        seed: 2,
        ..ExperimentOptions::default()
    };
    let r = run_experiment(ExperimentId::E2, &opts)?;
    let s = r.summary.e2.as_ref().expect("experiment 2 summary");

    // residual against the noiseless tensor: theta = 1/2 vs exact orthogonality
    println!(
        "noiseless reference: theta = 1/2 smaller on {}/{} (mean difference {:.4})",
        s.half_better, r.instances, s.mean_difference
    );

    // residual against the perturbed input each method was given
    println!(
        "perturbed reference: theta = 1/2 smaller on {}/{}",
        s.observed_half_better, r.instances
    );
    for rec in r.records.iter().take(5) {
        let e = rec.e2.as_ref().expect("experiment 2 record");
        println!(
            "  #{}: truth {:.4} vs {:.4}, input {:.4} vs {:.4}",
            rec.index, e.metric_half, e.metric_zero, e.observed_half, e.observed_zero
        );
    }
    Ok(())
}
