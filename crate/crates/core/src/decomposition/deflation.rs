use super::{Decomposition, StepDiagnostics};
use crate::error::{Error, Result};
use crate::solver::{best_rank_one, constrained_rank_one, ConstraintSet, SolverConfig};
use crate::tensor::{EigenPair, SymmetricTensor, UnitVector};

/// Initial slab width of the adaptive method.
pub const ADA_START: f64 = 0.5;
/// Multiplicative shrink applied while the acceptance test fails.
pub const ADA_SHRINK: f64 = 0.96;
/// The adaptive method gives up once `θ` drops below this.
pub const ADA_THETA_FLOOR: f64 = 1e-4;
/// Eigenvalue-ratio constant in the adaptive acceptance test.
const ADA_RATIO: f64 = 1.35;

/// Residual deflation: `(λ̂_k, v̂_k)` is the best rank-one approximation of
/// `T̂_{k−1}`, and `T̂_k = T̂_{k−1} − λ̂_k v̂_k^{⊗p}`. Runs exactly `n` steps.
pub fn sroa_rd(t: &SymmetricTensor, cfg: &SolverConfig) -> Result<Decomposition> {
    sroa_rd_trace(t, cfg).map(|(d, _)| d)
}

/// [`sroa_rd`] that also returns the deflated iterates `T̂_1, …, T̂_n`.
pub fn sroa_rd_trace(
    t: &SymmetricTensor,
    cfg: &SolverConfig,
) -> Result<(Decomposition, Vec<SymmetricTensor>)> {
    cfg.validate()?;
    let n = t.dim();
    let mut current = t.clone();
    let mut pairs = Vec::with_capacity(n);
    let mut diagnostics = Vec::with_capacity(n);
    let mut iterates = Vec::with_capacity(n);
    for step in 1..=n {
        let sol =
            best_rank_one(&current, &cfg.derived(&[step as u64])).map_err(|e| e.at_step(step))?;
        current = current.sub_rank_one(sol.pair.value, &sol.pair.vector)?;
        iterates.push(current.clone());
        diagnostics.push(StepDiagnostics {
            step,
            certificate: sol.certificate,
            theta: None,
            solves: 1,
        });
        pairs.push(sol.pair);
    }
    let decomposition = Decomposition {
        pairs,
        thetas: None,
        residual: current.frobenius_norm(),
        diagnostics,
    };
    Ok((decomposition, iterates))
}

/// Constrained deflation: step `k` maximizes `|T̂ v^{⊗p}|` over unit `v`
/// with `|⟨v, v̂_i⟩| ≤ θ` for all `i < k`. The input tensor is never modified.
///
/// `θ = 0` imposes exact orthogonality to earlier components.
pub fn sroa_cd(t: &SymmetricTensor, theta: f64, cfg: &SolverConfig) -> Result<Decomposition> {
    cfg.validate()?;
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::Config(format!("theta {theta} outside [0, 1]")));
    }
    let n = t.dim();
    let mut pairs: Vec<EigenPair> = Vec::with_capacity(n);
    let mut diagnostics = Vec::with_capacity(n);
    for step in 1..=n {
        let cs = ConstraintSet::new(anchors(&pairs), theta)?;
        let sol = constrained_rank_one(t, &cs, &cfg.derived(&[step as u64]))
            .map_err(|e| e.at_step(step))?;
        diagnostics.push(StepDiagnostics {
            step,
            certificate: sol.certificate,
            theta: Some(theta),
            solves: 1,
        });
        pairs.push(sol.pair);
    }
    let residual = super::residual_metric(t, &pairs)?;
    Ok(Decomposition {
        pairs,
        thetas: None,
        residual,
        diagnostics,
    })
}

/// Adaptive constrained deflation.
///
/// Starts from `θ = 1/2`. After each solve, while some earlier component
/// satisfies `|⟨v̂_k, v̂_i⟩| ≥ min{|λ̂_k| / (1.35 |λ̂_i|), θ}`, shrinks
/// `θ ← 0.96 θ` and solves step `k` again with fresh restarts. The accepted
/// `θ_k` are returned in `thetas`.
pub fn ada_sroa_cd(t: &SymmetricTensor, cfg: &SolverConfig) -> Result<Decomposition> {
    cfg.validate()?;
    let n = t.dim();
    let mut theta = ADA_START;
    let mut pairs: Vec<EigenPair> = Vec::with_capacity(n);
    let mut thetas = Vec::with_capacity(n);
    let mut diagnostics = Vec::with_capacity(n);
    for step in 1..=n {
        let anchors = anchors(&pairs);
        let mut solves = 0u64;
        let sol = loop {
            let cs = ConstraintSet::new(anchors.clone(), theta)?;
            let sol = constrained_rank_one(t, &cs, &cfg.derived(&[step as u64, solves]))
                .map_err(|e| e.at_step(step))?;
            solves += 1;
            if !needs_shrink(&sol.pair, &pairs, theta) {
                break sol;
            }
            theta *= ADA_SHRINK;
            if theta < ADA_THETA_FLOOR {
                return Err(Error::AdaptiveFailure {
                    step,
                    floor: ADA_THETA_FLOOR,
                });
            }
        };
        thetas.push(theta);
        diagnostics.push(StepDiagnostics {
            step,
            certificate: sol.certificate,
            theta: Some(theta),
            solves: solves as usize,
        });
        pairs.push(sol.pair);
    }
    let residual = super::residual_metric(t, &pairs)?;
    Ok(Decomposition {
        pairs,
        thetas: Some(thetas),
        residual,
        diagnostics,
    })
}

fn needs_shrink(candidate: &EigenPair, earlier: &[EigenPair], theta: f64) -> bool {
    earlier.iter().any(|prev| {
        let overlap = candidate.vector.dot(&prev.vector).abs();
        let ratio = if prev.value == 0.0 {
            f64::INFINITY
        } else {
            candidate.value.abs() / (ADA_RATIO * prev.value.abs())
        };
        overlap >= ratio.min(theta)
    })
}

fn anchors(pairs: &[EigenPair]) -> Vec<UnitVector> {
    pairs.iter().map(|p| p.vector.clone()).collect()
}
