//! Greedy decomposition drivers and alignment against ground truth.

mod deflation;
mod matching;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{SolverConfig, StationarityCertificate};
use crate::tensor::{EigenPair, SymmetricTensor};

pub use deflation::{
    ada_sroa_cd, sroa_cd, sroa_rd, sroa_rd_trace, ADA_SHRINK, ADA_START, ADA_THETA_FLOOR,
};
pub use matching::{exhaustive_match, match_components, MatchReport};

/// Per-step record kept alongside the extracted pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub step: usize,
    pub certificate: StationarityCertificate,
    /// Slab width in force when the step was accepted (constrained methods).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Number of solves at this step (adaptive method re-solves after shrinking).
    pub solves: usize,
}

/// Ordered output `{(λ̂_k, v̂_k)}` of a greedy decomposition.
///
/// Serialized as `{"pairs": [{"value", "vector"}], "thetas": [...], "residual": r}`
/// with an extra `diagnostics` array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub pairs: Vec<EigenPair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    /// `‖T̂ − Σ λ̂_k v̂_k^{⊗p}‖_F` for the input tensor.
    #[serde(default)]
    pub residual: f64,
    #[serde(default)]
    pub diagnostics: Vec<StepDiagnostics>,
}

impl Decomposition {
    /// Wraps known pairs (e.g. a ground truth) with no solver metadata.
    pub fn from_pairs(pairs: Vec<EigenPair>) -> Self {
        Self {
            pairs,
            thetas: None,
            residual: 0.0,
            diagnostics: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    /// `Σ λ̂_k v̂_k^{⊗p}`.
    pub fn reconstruct(&self, order: usize, dim: usize) -> Result<SymmetricTensor> {
        SymmetricTensor::from_pairs(order, dim, self.pairs.iter().map(|p| (p.value, &p.vector)))
    }

    pub fn all_converged(&self) -> bool {
        self.diagnostics.iter().all(|d| d.certificate.converged)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: Self = serde_json::from_str(s)?;
        if let Some(th) = &d.thetas {
            if th.len() != d.pairs.len() {
                return Err(Error::Dimension {
                    expected: d.pairs.len(),
                    got: th.len(),
                });
            }
        }
        Ok(d)
    }
}

/// Which greedy driver to run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Method {
    /// Residual deflation.
    Rd,
    /// Constrained deflation with fixed slab width.
    Cd { theta: f64 },
    /// Constrained deflation with adaptively shrinking slab width.
    Ada,
}

impl Method {
    pub fn run(&self, t: &SymmetricTensor, cfg: &SolverConfig) -> Result<Decomposition> {
        match *self {
            Method::Rd => sroa_rd(t, cfg),
            Method::Cd { theta } => sroa_cd(t, theta, cfg),
            Method::Ada => ada_sroa_cd(t, cfg),
        }
    }
}

/// `‖T − Σ λ̂_i v̂_i^{⊗p}‖_F`.
pub fn residual_metric(t: &SymmetricTensor, est: &[EigenPair]) -> Result<f64> {
    if let Some(p) = est.iter().find(|p| p.vector.dim() != t.dim()) {
        return Err(Error::Dimension {
            expected: t.dim(),
            got: p.vector.dim(),
        });
    }
    let mut r = t.clone();
    for p in est {
        r = r.sub_rank_one(p.value, &p.vector)?;
    }
    Ok(r.frobenius_norm())
}
