use sodtensor::experiments::{run_experiment, ExperimentId, ExperimentOptions, SweepOptions};
use sodtensor::Result;

fn main() -> Result<()> {
    // residual deflation bound ratios as n and the noise level grow
    let opts = ExperimentOptions {
        instances: Some(3),
        seed: 4,
        sweep: SweepOptions {
            dims: vec![2, 4, 6, 8],
            scales: vec![1.0, 8.0, 32.0],
            ..SweepOptions::default()
        },
        ..ExperimentOptions::default()
    };
    let r = run_experiment(ExperimentId::Sweep, &opts)?;
    println!(" n  scale  admissible  value/2eps  vector/(20eps/lambda)  hold");
    for c in r.summary.sweep.as_deref().unwrap_or_default() {
        println!(
            "{:2}  {:5}  {:>4}/{:<5}  {:10.3}  {:21.4}  {}/{}",
            c.n,
            c.noise_scale,
            c.admissible,
            c.count,
            c.max_value_ratio,
            c.max_vector_ratio,
            c.bounds_hold,
            c.count
        );
    }
    Ok(())
}
