//! Instance generation and the reproducible experiment batches.

mod report;
mod runner;

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from;
use crate::solver::SolverConfig;
use crate::tensor::{
    operator_norm, EigenPair, NormEstimate, SymmetricTensor, UnitVector, MAX_ENTRIES,
};

pub use report::{
    E1Record, E1Summary, E2Record, E2Summary, E3Record, ExperimentReport, Histogram,
    InstanceRecord, Summary, SweepCell, SweepRecord, HISTOGRAM_BINS, HISTOGRAM_MAX,
};
pub use runner::{run_experiment, ExperimentId, ExperimentOptions, SweepOptions, QUICK_INSTANCES};

/// Eigenvector basis of a generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Basis {
    Identity,
    /// `Q` from the QR factorization of a seeded Gaussian matrix, with
    /// column signs chosen so that `R` has a positive diagonal.
    RandomOrthonormal {
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub n: usize,
    pub p: usize,
    pub eigenvalues: Vec<f64>,
    pub basis: Basis,
    pub noise_scale: f64,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.eigenvalues.len() != self.n {
            return Err(Error::Spec(format!(
                "{} eigenvalues for dimension {}",
                self.eigenvalues.len(),
                self.n
            )));
        }
        if let Some(v) = self
            .eigenvalues
            .iter()
            .find(|v| !(v.is_finite() && **v != 0.0))
        {
            return Err(Error::Spec(format!(
                "eigenvalue {v} must be finite and nonzero"
            )));
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return Err(Error::Spec(format!(
                "noise scale {} must be >= 0",
                self.noise_scale
            )));
        }
        Ok(())
    }

    /// Ground truth plus (when `noise_scale > 0`) a scaled perturbation
    /// drawn from `seed`.
    pub fn generate(&self, cfg: &SolverConfig) -> Result<Instance> {
        let (truth_tensor, truth) = gen_sod(self)?;
        let (observed, noise) = if self.noise_scale > 0.0 {
            let e = gen_perturbation_with(self.n, self.p, self.seed, self.noise_scale, cfg)?;
            (truth_tensor.add(&e.tensor)?, Some(e))
        } else {
            (truth_tensor.clone(), None)
        };
        Ok(Instance {
            truth_tensor,
            truth,
            observed,
            noise,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub truth_tensor: SymmetricTensor,
    pub truth: Vec<EigenPair>,
    /// `T + E`.
    pub observed: SymmetricTensor,
    pub noise: Option<Perturbation>,
}

impl Instance {
    pub fn epsilon(&self) -> f64 {
        self.noise.as_ref().map_or(0.0, |e| e.epsilon)
    }
}

/// `T = Σ λ_i v_i^{⊗p}` and its pairs.
pub fn gen_sod(spec: &InstanceSpec) -> Result<(SymmetricTensor, Vec<EigenPair>)> {
    spec.validate()?;
    let vectors = match spec.basis {
        Basis::Identity => (0..spec.n).map(|i| UnitVector::basis(spec.n, i)).collect(),
        Basis::RandomOrthonormal { seed } => random_orthonormal(spec.n, seed)?,
    };
    let truth: Vec<EigenPair> = spec
        .eigenvalues
        .iter()
        .zip(vectors)
        .map(|(&l, v)| EigenPair::new(l, v))
        .collect::<Result<_>>()?;
    let t =
        SymmetricTensor::from_pairs(spec.p, spec.n, truth.iter().map(|q| (q.value, &q.vector)))?;
    Ok((t, truth))
}

/// Columns of a seeded random orthogonal matrix.
pub fn random_orthonormal(n: usize, seed: u64) -> Result<Vec<UnitVector>> {
    if n == 0 {
        return Err(Error::Spec("dimension must be positive".into()));
    }
    let mut rng = rng_from(seed, &[]);
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    (0..n)
        .map(|j| {
            let s = if r[(j, j)] < 0.0 { -1.0 } else { 1.0 };
            UnitVector::normalize(q.column(j).iter().map(|x| s * x).collect())
        })
        .collect()
}

/// Symmetrized Gaussian noise with its operator-norm estimate `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub tensor: SymmetricTensor,
    pub epsilon: f64,
    pub estimate: NormEstimate,
}

/// `E = symmetrize(G)` with i.i.d. standard normal `G` drawn from `seed`,
/// and `ε = ‖E‖` estimated with the default solver settings.
pub fn gen_perturbation(n: usize, p: usize, seed: u64) -> Result<Perturbation> {
    gen_perturbation_with(n, p, seed, 1.0, &SolverConfig::default())
}

/// [`gen_perturbation`] with a scale factor and explicit solver settings
/// for the norm estimate (its seed is derived from `seed`).
pub fn gen_perturbation_with(
    n: usize,
    p: usize,
    seed: u64,
    scale: f64,
    cfg: &SolverConfig,
) -> Result<Perturbation> {
    let len = n
        .checked_pow(p as u32)
        .filter(|&l| l <= MAX_ENTRIES)
        .ok_or(Error::SizeCap {
            entries: n.saturating_pow(p as u32),
            cap: MAX_ENTRIES,
        })?;
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(Error::Spec(format!("noise scale {scale} must be >= 0")));
    }
    let mut rng = rng_from(seed, &[0]);
    let raw: Vec<f64> = (0..len)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            scale * z
        })
        .collect();
    let tensor = SymmetricTensor::symmetrize(&raw, p, n)?;
    let estimate = operator_norm(&tensor, &cfg.with_seed(crate::rng::derive_seed(seed, &[1])))?;
    Ok(Perturbation {
        tensor,
        epsilon: estimate.value,
        estimate,
    })
}
