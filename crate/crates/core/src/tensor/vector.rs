use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the Euclidean norm of a [`UnitVector`].
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// A real vector with Euclidean norm 1 (to within [`UNIT_NORM_TOL`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// Normalizes `v`. Fails on empty, zero, or non-finite input.
    pub fn normalize(mut v: Vec<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::Vector("empty vector".into()));
        }
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let norm = norm2(&v);
        if norm == 0.0 {
            return Err(Error::Vector("zero vector cannot be normalized".into()));
        }
        v.iter_mut().for_each(|x| *x /= norm);
        Ok(Self(v))
    }

    /// Accepts `v` only if it is already unit-norm; no rescaling.
    pub fn from_unit(v: Vec<f64>) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::Vector("empty vector".into()));
        }
        if let Some(i) = v.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let norm = norm2(&v);
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::Vector(format!("norm {norm} is not 1")));
        }
        Ok(Self(v))
    }

    /// Standard basis vector `e_i` in dimension `dim` (zero-based `i`).
    pub fn basis(dim: usize, i: usize) -> Self {
        assert!(i < dim, "basis index {i} out of range for dim {dim}");
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        dot(&self.0, other)
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// `min(‖self − other‖, ‖self + other‖)`.
    pub fn sign_invariant_distance(&self, other: &[f64]) -> f64 {
        let plus = self
            .0
            .iter()
            .zip(other)
            .map(|(a, b)| (a + b) * (a + b))
            .sum::<f64>()
            .sqrt();
        self.distance(other).min(plus)
    }
}

impl Deref for UnitVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for UnitVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        // Files store rounded vectors; accept anything close and renormalize.
        let norm = norm2(&v);
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::Vector(format!("norm {norm} is not 1")));
        }
        Self::normalize(v)
    }
}

impl From<UnitVector> for Vec<f64> {
    fn from(v: UnitVector) -> Self {
        v.0
    }
}

/// Eigenvalue / eigenvector pair `(λ, v)` of a symmetric tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: f64,
    pub vector: UnitVector,
}

impl EigenPair {
    pub fn new(value: f64, vector: UnitVector) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Domain(format!("eigenvalue {value} is not finite")));
        }
        Ok(Self { value, vector })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc + x * y)
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_rescales() {
        let v = UnitVector::normalize(vec![3.0, 4.0]).unwrap();
        assert!((v[0] - 0.6).abs() < 1e-15);
        assert!((norm2(&v) - 1.0).abs() <= UNIT_NORM_TOL);
    }

    #[test]
    fn rejects_zero_and_nan() {
        assert!(UnitVector::normalize(vec![0.0, 0.0]).is_err());
        assert!(UnitVector::normalize(vec![f64::NAN, 1.0]).is_err());
        assert!(UnitVector::from_unit(vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn sign_invariant_distance_ignores_flip() {
        let v = UnitVector::normalize(vec![1.0, -2.0, 2.0]).unwrap();
        let w = v.negated();
        assert_eq!(v.sign_invariant_distance(&w), 0.0);
        assert!((v.distance(&w) - 2.0).abs() < 1e-15);
    }
}
