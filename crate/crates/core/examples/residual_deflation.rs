use sodtensor::bounds::{verify, CheckOptions, Theorem};
use sodtensor::experiments::{gen_perturbation, gen_sod, Basis, InstanceSpec};
use sodtensor::{match_components, sroa_rd, Result, SolverConfig};

fn main() -> Result<()> {
    // random orthonormal basis, p = 4
    let spec = InstanceSpec {
        n: 4,
        p: 4,
        eigenvalues: vec![50.0, -40.0, 30.0, 20.0],
        basis: Basis::RandomOrthonormal { seed: 11 },
        noise_scale: 0.0,
        seed: 0,
    };
    let (t, truth) = gen_sod(&spec)?;
    let cfg = SolverConfig::default().with_seed(1);

    // noiseless input: exact recovery
    let d = sroa_rd(&t, &cfg)?;
    let m = match_components(&truth, &d.pairs)?;
    println!("exact: values {:.6?}", d.values());
    println!(
        "       max vector error {:.2e}, residual {:.2e}",
        m.max_vector_error(),
        d.residual
    );

    // add symmetrized Gaussian noise and check the 2 eps / 20 eps / |lambda| bounds
    let e = gen_perturbation(4, 4, 3)?;
    let noisy = t.add(&e.tensor.scaled(0.2))?;
    let eps = e.epsilon * 0.2;
    let d = sroa_rd(&noisy, &cfg)?;
    let r = verify(Theorem::Rd, 4, &truth, &d, eps, CheckOptions::default())?;
    println!(
        "noisy: eps = {eps:.4}, admissible {} (heuristic threshold)",
        r.admissible
    );
    for c in &r.per_component {
        println!(
            "  k={} -> truth {}: value error {:.4} <= {:.4}, vector error {:.5} <= {:.5}",
            c.index + 1,
            c.truth_index + 1,
            c.value_error,
            c.value_bound,
            c.vector_error,
            c.vector_bound
        );
    }
    println!("bounds hold: {}", r.bounds_hold());
    Ok(())
}
