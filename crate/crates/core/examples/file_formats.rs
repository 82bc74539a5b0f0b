use std::fs;

use sodtensor::experiments::{gen_sod, Basis, InstanceSpec};
use sodtensor::{match_components, sroa_cd, Decomposition, SolverConfig, SymmetricTensor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile::tempdir()?;
    let spec = InstanceSpec {
        n: 3,
        p: 3,
        eigenvalues: vec![3.0, 2.0, 1.0],
        basis: Basis::RandomOrthonormal { seed: 9 },
        noise_scale: 0.0,
        seed: 0,
    };
    let (t, truth) = gen_sod(&spec)?;

    // tensor.json: {"order", "dim", "data"}
    let path = dir.path().join("tensor.json");
    fs::write(&path, t.to_json()?)?;
    let t = SymmetricTensor::from_json(&fs::read_to_string(&path)?)?;

    // decomp.json: {"pairs": [{"value", "vector"}], "thetas", "residual", "diagnostics"}
    let d = sroa_cd(&t, 1.0 / 6.0, &SolverConfig::default())?;
    let path = dir.path().join("decomp.json");
    fs::write(&path, d.to_json()?)?;
    let d = Decomposition::from_json(&fs::read_to_string(&path)?)?;
    println!(
        "{}",
        fs::read_to_string(&path)?
            .lines()
            .take(12)
            .collect::<Vec<_>>()
            .join("\n")
    );

    // match report: permutation, signs, per-component errors
    let m = match_components(&truth, &d.pairs)?;
    println!("{}", serde_json::to_string_pretty(&m)?);

    // files that are not symmetric within 1e-9 are rejected
    let bad = r#"{"order": 2, "dim": 2, "data": [1.0, 0.5, 0.4, 1.0]}"#;
    println!(
        "asymmetric file: {}",
        SymmetricTensor::from_json(bad).unwrap_err()
    );
    Ok(())
}
