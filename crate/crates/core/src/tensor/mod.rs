//! Symmetric tensors, unit vectors, eigenpairs, and tensor norms.

mod norm;
mod symmetric;
mod vector;

pub use norm::{operator_norm, NormEstimate};
pub use symmetric::{SymmetricTensor, TensorFile, LOAD_SYMMETRY_TOL, MAX_ENTRIES, MAX_ORDER};
pub use vector::{EigenPair, UnitVector, UNIT_NORM_TOL};

pub(crate) use vector::{dot, norm2};
