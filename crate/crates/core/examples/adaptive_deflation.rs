use sodtensor::bounds::{verify, CheckOptions, Theorem};
use sodtensor::experiments::gen_perturbation;
use sodtensor::{ada_sroa_cd, EigenPair, Result, SolverConfig, SymmetricTensor, UnitVector};

fn main() -> Result<()> {
    let truth: Vec<EigenPair> = [1000.0, 100.0, 100.0, 100.0, 100.0]
        .iter()
        .enumerate()
        .map(|(i, &l)| EigenPair::new(l, UnitVector::basis(5, i)))
        .collect::<Result<_>>()?;
    let t = SymmetricTensor::from_pairs(3, 5, truth.iter().map(|q| (q.value, &q.vector)))?;
    let cfg = SolverConfig::default();

    // theta shrinks by 0.96 until no earlier component is too close
    let d = ada_sroa_cd(&t, &cfg)?;
    println!("thetas {:.4?}", d.thetas.as_deref().unwrap_or_default());
    for s in &d.diagnostics {
        println!(
            "  step {}: {} solve(s), lambda = {:.4}",
            s.step,
            s.solves,
            d.pairs[s.step - 1].value
        );
    }
    let r = verify(Theorem::Ada, 3, &truth, &d, 0.0, CheckOptions::default())?;
    let chain = r.theta_chain.as_ref().expect("adaptive report");
    println!(
        "final theta {:.4} > {:.4}: {}, bounds hold: {}",
        chain.final_theta,
        chain.floor,
        chain.above_floor,
        r.bounds_hold()
    );

    // a small perturbation inside the adaptive regime (eps <= lambda_min / (70 kappa^2))
    let e = gen_perturbation(5, 3, 5)?;
    let scale = 0.01 / e.epsilon;
    let d = ada_sroa_cd(&t.add(&e.tensor.scaled(scale))?, &cfg)?;
    let r = verify(Theorem::Ada, 3, &truth, &d, 0.01, CheckOptions::default())?;
    println!(
        "eps = 0.01: admissible {}, bounds hold {}",
        r.admissible,
        r.bounds_hold()
    );
    Ok(())
}
