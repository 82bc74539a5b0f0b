use sodtensor::{Result, SymmetricTensor, UnitVector};

fn main() -> Result<()> {
    // average a raw 2x2 matrix over index permutations
    let t = SymmetricTensor::symmetrize(&[0.0, 1.0, 0.0, 0.0], 2, 2)?;
    println!("symmetrized: {:?}", t.data());

    // T = 1000 e1^3 + 100 (e2^3 + ... + e5^3)
    let pairs: Vec<(f64, UnitVector)> = (0..5)
        .map(|i| (if i == 0 { 1000.0 } else { 100.0 }, UnitVector::basis(5, i)))
        .collect();
    let t = SymmetricTensor::from_pairs(3, 5, pairs.iter().map(|(l, v)| (*l, v)))?;
    println!("||T||_F = {:.4}", t.frobenius_norm());

    // T x^3 and T x^2 at x = (1/2, 0, sqrt(3)/2, 0, 0)
    let x = [0.5, 0.0, 0.75f64.sqrt(), 0.0, 0.0];
    println!("T x^3 = {:.4}", t.apply_full(&x)?);
    println!("T x^2 = {:.4?}", t.apply_partial(&x)?);

    // <u^3, v^3> = <u, v>^3
    let u = UnitVector::normalize(vec![1.0, 1.0, 0.0, 0.0, 0.0])?;
    let a = SymmetricTensor::rank_one(1.0, &u, 3)?;
    let b = SymmetricTensor::rank_one(1.0, &UnitVector::basis(5, 0), 3)?;
    println!(
        "<u^3, e1^3> = {:.6} (expected {:.6})",
        a.inner(&b)?,
        0.5f64.sqrt().powi(3)
    );

    // tensors round-trip through {"order", "dim", "data"}
    let back = SymmetricTensor::from_json(&t.to_json()?)?;
    assert_eq!(back, t);
    Ok(())
}
