use serde::{Deserialize, Serialize};

use super::SymmetricTensor;
use crate::error::Result;
use crate::solver::{best_rank_one, SolverConfig};

/// Estimate of the operator norm `max_{‖x‖=1} |T x^{⊗p}|`.
///
/// The value is attained at a computed unit vector, so it is a certified
/// lower bound on the true norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub converged: bool,
    pub restarts: usize,
}

/// Multi-restart shifted power iteration on `|T x^{⊗p}|`.
pub fn operator_norm(t: &SymmetricTensor, cfg: &SolverConfig) -> Result<NormEstimate> {
    let sol = best_rank_one(t, cfg)?;
    Ok(NormEstimate {
        value: sol.pair.value.abs(),
        converged: sol.certificate.converged,
        restarts: cfg.restarts,
    })
}
