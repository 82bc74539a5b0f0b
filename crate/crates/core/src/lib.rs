//! Greedy decomposition of (nearly) symmetric orthogonally decomposable
//! tensors.
//!
//! A symmetric tensor `T = Σ λ_i v_i^{⊗p}` with orthonormal `v_i` is recovered
//! one component at a time by successive rank-one approximation. Three
//! drivers are provided:
//!
//! - [`sroa_rd`]: subtract each rank-one term from the tensor (residual
//!   deflation);
//! - [`sroa_cd`]: keep the tensor and restrict later components to the slab
//!   `|⟨v, v̂_i⟩| ≤ θ` around earlier ones (constrained deflation);
//! - [`ada_sroa_cd`]: constrained deflation that shrinks `θ` on the fly.
//!
//! The [`bounds`] module evaluates the perturbation guarantees of these
//! methods against a ground-truth decomposition, and [`experiments`]
//! generates instances and runs reproducible batches.

pub mod bounds;
pub mod decomposition;
mod error;
pub mod experiments;
pub mod rng;
pub mod solver;
pub mod tensor;

pub use decomposition::{
    ada_sroa_cd, exhaustive_match, match_components, residual_metric, sroa_cd, sroa_rd,
    Decomposition, MatchReport, Method,
};
pub use error::{Error, Result};
pub use solver::{
    best_rank_one, brute_force_rank_one, constrained_rank_one, ConstraintSet, RankOneSolution,
    SolverConfig, StationarityCertificate,
};
pub use tensor::{operator_norm, EigenPair, NormEstimate, SymmetricTensor, UnitVector};
