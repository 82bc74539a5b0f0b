use sodtensor::{sroa_cd, Decomposition, Result, SolverConfig, SymmetricTensor, UnitVector};

fn print(label: &str, d: &Decomposition) {
    println!("{label}");
    for p in &d.pairs {
        println!("  {:8.2}  {:5.2?}", p.value, p.vector.as_slice());
    }
}

fn main() -> Result<()> {
    // one dominant component: kappa = 10
    let pairs: Vec<(f64, UnitVector)> = (0..5)
        .map(|i| (if i == 0 { 1000.0 } else { 100.0 }, UnitVector::basis(5, i)))
        .collect();
    let t = SymmetricTensor::from_pairs(3, 5, pairs.iter().map(|(l, v)| (*l, v)))?;
    let cfg = SolverConfig::default();

    // a wide slab lets later components lean toward e1
    print("theta = 1/2", &sroa_cd(&t, 0.5, &cfg)?);

    // theta = 1/(2 kappa) recovers the axes
    print("theta = 1/20", &sroa_cd(&t, 0.05, &cfg)?);
    Ok(())
}
