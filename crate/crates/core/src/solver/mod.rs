//! Best rank-one approximation, with and without near-orthogonality slabs.
//!
//! Minimizing `‖T − λ v^{⊗p}‖_F` over `λ` and unit `v` is the same as
//! maximizing `|T v^{⊗p}|` and setting `λ = T v^{⊗p}`. Both solvers run a
//! shifted power ascent from many seeded random starts and keep the best
//! stationary point.

mod ascent;
mod constraints;
mod oracle;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from};
use crate::tensor::{EigenPair, SymmetricTensor, UnitVector};

pub use constraints::{ConstraintSet, ACTIVE_TOL, FEASIBILITY_SLACK};
pub use oracle::brute_force_rank_one;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Number of random starting points.
    pub restarts: usize,
    /// Iteration cap per start.
    pub max_iters: usize,
    /// Stationarity tolerance on the KKT residual.
    pub tol: f64,
    pub seed: u64,
    /// Initial (and minimum) shift of the power ascent; raised on demand
    /// whenever a step fails to increase the objective.
    pub shift: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            restarts: 50,
            max_iters: 5000,
            tol: 1e-9,
            seed: 0,
            shift: 0.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("tol {} must be positive", self.tol)));
        }
        if !(self.shift >= 0.0 && self.shift.is_finite()) {
            return Err(Error::Config(format!(
                "shift {} must be nonnegative",
                self.shift
            )));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    /// Same settings with a seed derived from `path`.
    pub fn derived(&self, path: &[u64]) -> Self {
        self.with_seed(derive_seed(self.seed, path))
    }
}

/// First-order optimality evidence for a returned solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarityCertificate {
    /// Norm of `T v^{⊗p−1}` after removing its components along `v` and the
    /// active anchors. Equals `‖T v^{⊗p−1} − λ v‖` when nothing is active.
    pub kkt_residual: f64,
    /// Anchors whose slab is tight at `v`.
    pub active_constraints: Vec<usize>,
    /// `T v^{⊗p}`.
    pub objective: f64,
    pub converged: bool,
    /// Input tensor was identically zero.
    pub degenerate: bool,
    pub iterations: usize,
    /// Restart that produced the returned point.
    pub restart: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOneSolution {
    pub pair: EigenPair,
    pub certificate: StationarityCertificate,
}

/// Best rank-one approximation of `t`.
pub fn best_rank_one(t: &SymmetricTensor, cfg: &SolverConfig) -> Result<RankOneSolution> {
    constrained_rank_one(t, &ConstraintSet::unconstrained(), cfg)
}

/// Best rank-one approximation subject to `|⟨v, a_i⟩| ≤ θ` for each anchor.
///
/// Ties between restarts (within `1e-12` relative) go to the lowest restart
/// index, so the result is independent of thread scheduling.
pub fn constrained_rank_one(
    t: &SymmetricTensor,
    cs: &ConstraintSet,
    cfg: &SolverConfig,
) -> Result<RankOneSolution> {
    cfg.validate()?;
    cs.check_dim(t.dim())?;
    let dim = t.dim();

    if t.frobenius_norm() == 0.0 {
        let e1 = UnitVector::basis(dim, 0);
        let v = cs.maximize_linear(&e1, &e1)?;
        return finish(t, cs, v, 0, 0, true, true);
    }

    let signs: &[f64] = if t.order() % 2 == 1 {
        &[1.0]
    } else {
        &[1.0, -1.0]
    };
    let runs: Vec<ascent::Outcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| -> Result<Vec<ascent::Outcome>> {
            let mut rng = rng_from(cfg.seed, &[r as u64]);
            let g: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let x0 = cs.maximize_linear(&g, &g)?;
            signs
                .iter()
                .map(|&s| ascent::run(t, cs, x0.clone(), s, cfg))
                .map(|o| o.map(|o| o.with_restart(r)))
                .collect()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let best = runs
        .iter()
        .map(|o| o.objective.abs())
        .fold(f64::NEG_INFINITY, f64::max);
    let cutoff = best - 1e-12 * best.max(1.0);
    let winner = runs
        .into_iter()
        .find(|o| o.objective.abs() >= cutoff)
        .expect("at least one restart");
    finish(
        t,
        cs,
        winner.x,
        winner.iterations,
        winner.restart,
        winner.converged,
        false,
    )
}

fn finish(
    t: &SymmetricTensor,
    cs: &ConstraintSet,
    v: Vec<f64>,
    iterations: usize,
    restart: usize,
    converged: bool,
    degenerate: bool,
) -> Result<RankOneSolution> {
    let vector = UnitVector::normalize(v)?;
    if !cs.is_feasible(&vector, FEASIBILITY_SLACK) {
        return Err(Error::Infeasible {
            theta: cs.theta(),
            anchors: cs.anchors().len(),
        });
    }
    let g = t.apply_partial(&vector)?;
    let value = t.apply_full(&vector)?;
    let kkt_residual = cs.kkt_residual(&vector, &g);
    let certificate = StationarityCertificate {
        kkt_residual,
        active_constraints: cs.active(&vector),
        objective: value,
        converged,
        degenerate,
        iterations,
        restart,
    };
    Ok(RankOneSolution {
        pair: EigenPair::new(value, vector)?,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp3_tensor() -> SymmetricTensor {
        let mut pairs = vec![(1000.0, UnitVector::basis(5, 0))];
        pairs.extend((1..5).map(|i| (100.0, UnitVector::basis(5, i))));
        SymmetricTensor::from_pairs(3, 5, pairs.iter().map(|(l, v)| (*l, v))).unwrap()
    }

    #[test]
    fn exact_rank_one_input() {
        let v = UnitVector::basis(3, 1);
        let t = SymmetricTensor::rank_one(5.0, &v, 3).unwrap();
        let sol = best_rank_one(&t, &SolverConfig::default()).unwrap();
        assert!((sol.pair.value - 5.0).abs() < 1e-12);
        assert!(sol.pair.vector.sign_invariant_distance(&v) < 1e-9);
        assert!(sol.certificate.converged);
        assert!(sol.certificate.kkt_residual <= 1e-9);
    }

    #[test]
    fn all_equal_diagonal_picks_an_axis() {
        let axes: Vec<_> = (0..5).map(|i| UnitVector::basis(5, i)).collect();
        let t = SymmetricTensor::from_pairs(3, 5, axes.iter().map(|v| (300.0, v))).unwrap();
        let sol = best_rank_one(&t, &SolverConfig::default()).unwrap();
        assert!((sol.pair.value - 300.0).abs() < 1e-9);
        let hit = axes
            .iter()
            .any(|e| e.sign_invariant_distance(&sol.pair.vector) < 1e-8);
        assert!(hit, "{:?}", sol.pair.vector);
    }

    #[test]
    fn zero_tensor_is_degenerate() {
        let t = SymmetricTensor::zeros(3, 4).unwrap();
        let sol = best_rank_one(&t, &SolverConfig::default()).unwrap();
        assert_eq!(sol.pair.value, 0.0);
        assert_eq!(sol.pair.vector, UnitVector::basis(4, 0));
        assert!(sol.certificate.degenerate);
    }

    #[test]
    fn negative_even_order_spike() {
        let v = UnitVector::normalize(vec![1.0, -1.0, 2.0]).unwrap();
        let w = UnitVector::normalize(vec![1.0, 1.0, 0.0]).unwrap();
        let t = SymmetricTensor::from_pairs(4, 3, [(-6.0, &v), (2.0, &w)]).unwrap();
        let sol = best_rank_one(&t, &SolverConfig::default()).unwrap();
        assert!((sol.pair.value + 6.0).abs() < 1e-9);
        assert!(sol.pair.vector.sign_invariant_distance(&v) < 1e-8);
    }

    #[test]
    fn exp3_half_theta_goes_to_boundary() {
        let t = exp3_tensor();
        let cs = ConstraintSet::new(vec![UnitVector::basis(5, 0)], 0.5).unwrap();
        let sol = constrained_rank_one(&t, &cs, &SolverConfig::default()).unwrap();
        let v = &sol.pair.vector;
        assert!(
            (sol.pair.value - 189.95).abs() < 0.005,
            "{}",
            sol.pair.value
        );
        assert!((v[0].abs() - 0.5).abs() < 1e-9);
        let big = v[1..].iter().map(|x| x.abs()).fold(0.0, f64::max);
        assert!((big - 0.75f64.sqrt()).abs() < 1e-8);
        assert_eq!(sol.certificate.active_constraints, vec![0]);
        assert!(sol.certificate.kkt_residual < 1e-8);
    }

    #[test]
    fn exp3_small_theta_recovers_axis() {
        let t = exp3_tensor();
        let cs = ConstraintSet::new(vec![UnitVector::basis(5, 0)], 0.05).unwrap();
        let sol = constrained_rank_one(&t, &cs, &SolverConfig::default()).unwrap();
        assert!((sol.pair.value - 100.0).abs() < 1e-9);
        assert!(sol.pair.vector[0].abs() < 1e-9);
        assert!(sol.certificate.active_constraints.is_empty());
    }

    #[test]
    fn empty_constraints_match_unconstrained() {
        let raw: Vec<f64> = (0..64).map(|i| ((i * 7 % 13) as f64 - 6.0) / 3.0).collect();
        let t = SymmetricTensor::symmetrize(&raw, 3, 4).unwrap();
        let cfg = SolverConfig::default();
        let a = best_rank_one(&t, &cfg).unwrap();
        let b = constrained_rank_one(&t, &ConstraintSet::new(vec![], 0.3).unwrap(), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn config_validation() {
        let t = SymmetricTensor::zeros(3, 2).unwrap();
        let bad = SolverConfig {
            restarts: 0,
            ..SolverConfig::default()
        };
        assert!(best_rank_one(&t, &bad).is_err());
        let bad = SolverConfig {
            tol: 0.0,
            ..SolverConfig::default()
        };
        assert!(best_rank_one(&t, &bad).is_err());
    }
}
