use sodtensor::{
    best_rank_one, brute_force_rank_one, constrained_rank_one, operator_norm, ConstraintSet,
    Result, SolverConfig, SymmetricTensor, UnitVector,
};

fn main() -> Result<()> {
    let raw: Vec<f64> = (0..27).map(|i| ((i * 7 % 13) as f64 - 6.0) / 3.0).collect();
    let t = SymmetricTensor::symmetrize(&raw, 3, 3)?;
    let cfg = SolverConfig::default().with_seed(7);

    // multi-restart ascent against the exhaustive search
    let sol = best_rank_one(&t, &cfg)?;
    let oracle = brute_force_rank_one(&t, &ConstraintSet::unconstrained(), 720)?;
    println!(
        "solver  lambda = {:.9}  v = {:.6?}",
        sol.pair.value,
        sol.pair.vector.as_slice()
    );
    println!(
        "oracle  lambda = {:.9}  v = {:.6?}",
        oracle.value,
        oracle.vector.as_slice()
    );
    println!(
        "kkt residual {:.2e}, {} iterations, restart {}",
        sol.certificate.kkt_residual, sol.certificate.iterations, sol.certificate.restart
    );
    println!("||T|| ~ {:.9}", operator_norm(&t, &cfg)?.value);

    // keep |<v, v1>| <= 0.3 for the first solution v1
    let cs = ConstraintSet::new(vec![sol.pair.vector.clone()], 0.3)?;
    let c = constrained_rank_one(&t, &cs, &cfg)?;
    let oracle = brute_force_rank_one(&t, &cs, 720)?;
    println!(
        "constrained lambda = {:.9} (oracle {:.9}), overlap {:.6}, active {:?}",
        c.pair.value,
        oracle.value,
        c.pair.vector.dot(&sol.pair.vector).abs(),
        c.certificate.active_constraints
    );

    // theta = 0 restricts to the orthogonal complement
    let cs = ConstraintSet::new(vec![UnitVector::basis(3, 0)], 0.0)?;
    let c = constrained_rank_one(&t, &cs, &cfg)?;
    println!(
        "in e1's complement: lambda = {:.9}, v = {:.6?}",
        c.pair.value,
        c.pair.vector.as_slice()
    );
    Ok(())
}
