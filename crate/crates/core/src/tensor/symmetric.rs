//! Dense storage for permutation-symmetric tensors.
//!
//! Entries are kept as a flat row-major array of length `n^p`; the index
//! `(i_1, …, i_p)` lives at offset `Σ i_k · n^(p−k)`. Every constructor goes
//! through [`SymmetricTensor::symmetrize`] or a product formula evaluated on
//! the sorted index tuple, so symmetry holds bit-for-bit.

use serde::{Deserialize, Serialize};

use super::vector::UnitVector;
use crate::error::{Error, Result};

/// Largest supported order.
pub const MAX_ORDER: usize = 6;
/// Largest number of stored entries (`n^p`).
pub const MAX_ENTRIES: usize = 10_000_000;
/// Absolute symmetry tolerance applied when loading tensors from files.
pub const LOAD_SYMMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensorFile", into = "TensorFile")]
pub struct SymmetricTensor {
    order: usize,
    dim: usize,
    data: Vec<f64>,
}

/// On-disk layout: `{"order": p, "dim": n, "data": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorFile {
    pub order: usize,
    pub dim: usize,
    pub data: Vec<f64>,
}

impl TryFrom<TensorFile> for SymmetricTensor {
    type Error = Error;
    fn try_from(f: TensorFile) -> Result<Self> {
        SymmetricTensor::from_nearly_symmetric(&f.data, f.order, f.dim, LOAD_SYMMETRY_TOL)
    }
}

impl From<SymmetricTensor> for TensorFile {
    fn from(t: SymmetricTensor) -> Self {
        TensorFile {
            order: t.order,
            dim: t.dim,
            data: t.data,
        }
    }
}

fn check_shape(order: usize, dim: usize) -> Result<usize> {
    if !(2..=MAX_ORDER).contains(&order) || dim == 0 {
        return Err(Error::InvalidShape { order, dim });
    }
    match dim.checked_pow(order as u32) {
        Some(len) if len <= MAX_ENTRIES => Ok(len),
        Some(len) => Err(Error::SizeCap {
            entries: len,
            cap: MAX_ENTRIES,
        }),
        None => Err(Error::SizeCap {
            entries: usize::MAX,
            cap: MAX_ENTRIES,
        }),
    }
}

/// Decodes a flat offset into its index tuple (most significant first).
fn decode(mut offset: usize, dim: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut().rev() {
        *slot = offset % dim;
        offset /= dim;
    }
}

fn encode(idx: &[usize], dim: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * dim + i)
}

/// Lexicographic successor; returns false once the last permutation is reached.
fn next_permutation(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

fn is_sorted(idx: &[usize]) -> bool {
    idx.windows(2).all(|w| w[0] <= w[1])
}

/// Visits each orbit of index tuples under permutation, passing the list of
/// offsets in the orbit (lexicographic order of the permuted tuple).
fn for_each_orbit(order: usize, dim: usize, mut f: impl FnMut(&[usize])) {
    let len = dim.pow(order as u32);
    let mut idx = vec![0usize; order];
    let mut perm = vec![0usize; order];
    let mut offsets = Vec::new();
    for offset in 0..len {
        decode(offset, dim, &mut idx);
        if !is_sorted(&idx) {
            continue;
        }
        offsets.clear();
        perm.copy_from_slice(&idx);
        loop {
            offsets.push(encode(&perm, dim));
            if !next_permutation(&mut perm) {
                break;
            }
        }
        f(&offsets);
    }
}

impl SymmetricTensor {
    /// Averages `raw` over all index permutations.
    ///
    /// Orbits whose entries are already bit-identical are copied unchanged,
    /// so symmetrizing a symmetric tensor is the identity.
    pub fn symmetrize(raw: &[f64], order: usize, dim: usize) -> Result<Self> {
        let len = check_shape(order, dim)?;
        if raw.len() != len {
            return Err(Error::Dimension {
                expected: len,
                got: raw.len(),
            });
        }
        if let Some(i) = raw.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let mut data = vec![0.0; len];
        for_each_orbit(order, dim, |offsets| {
            let first = raw[offsets[0]];
            let value = if offsets.iter().all(|&o| raw[o].to_bits() == first.to_bits()) {
                first
            } else {
                offsets.iter().fold(0.0, |acc, &o| acc + raw[o]) / offsets.len() as f64
            };
            for &o in offsets {
                data[o] = value;
            }
        });
        Ok(Self { order, dim, data })
    }

    /// Validates that `raw` is symmetric to `tol` (absolute) and then
    /// symmetrizes it exactly.
    pub fn from_nearly_symmetric(raw: &[f64], order: usize, dim: usize, tol: f64) -> Result<Self> {
        let len = check_shape(order, dim)?;
        if raw.len() != len {
            return Err(Error::Dimension {
                expected: len,
                got: raw.len(),
            });
        }
        if let Some(i) = raw.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let mut violation = None;
        for_each_orbit(order, dim, |offsets| {
            if violation.is_some() {
                return;
            }
            let first = raw[offsets[0]];
            for &o in &offsets[1..] {
                let deviation = (raw[o] - first).abs();
                if deviation > tol {
                    violation = Some(Error::NotSymmetric {
                        offset: o,
                        deviation,
                    });
                    return;
                }
            }
        });
        match violation {
            Some(err) => Err(err),
            None => Self::symmetrize(raw, order, dim),
        }
    }

    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        let len = check_shape(order, dim)?;
        Ok(Self {
            order,
            dim,
            data: vec![0.0; len],
        })
    }

    /// `λ · v^{⊗p}`.
    pub fn rank_one(lambda: f64, v: &UnitVector, order: usize) -> Result<Self> {
        let dim = v.dim();
        let len = check_shape(order, dim)?;
        if !lambda.is_finite() {
            return Err(Error::Domain(format!("coefficient {lambda} is not finite")));
        }
        let mut idx = vec![0usize; order];
        let data = (0..len)
            .map(|offset| lambda * sorted_product(v, offset, dim, &mut idx))
            .collect();
        Ok(Self { order, dim, data })
    }

    /// `Σ λ_i v_i^{⊗p}` for the given pairs.
    pub fn from_pairs<'a>(
        order: usize,
        dim: usize,
        pairs: impl IntoIterator<Item = (f64, &'a UnitVector)>,
    ) -> Result<Self> {
        let mut t = Self::zeros(order, dim)?;
        for (lambda, v) in pairs {
            t = t.sub_rank_one(-lambda, v)?;
        }
        Ok(t)
    }

    /// `self − λ · v^{⊗p}`.
    pub fn sub_rank_one(&self, lambda: f64, v: &UnitVector) -> Result<Self> {
        if v.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: v.dim(),
            });
        }
        let mut idx = vec![0usize; self.order];
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(offset, &t)| t - lambda * sorted_product(v, offset, self.dim, &mut idx))
            .collect();
        Ok(Self {
            order: self.order,
            dim: self.dim,
            data,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            order: self.order,
            dim: self.dim,
            data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            order: self.order,
            dim: self.dim,
            data,
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            order: self.order,
            dim: self.dim,
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        assert_eq!(idx.len(), self.order, "index arity must equal the order");
        self.data[encode(idx, self.dim)]
    }

    /// `T x^{⊗p−1} = T(x, …, x, I)`.
    pub fn apply_partial(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_vector(x)?;
        Ok(self.contract(x, self.order - 1))
    }

    /// `T x^{⊗p}`, the degree-p form.
    pub fn apply_full(&self, x: &[f64]) -> Result<f64> {
        self.check_vector(x)?;
        Ok(self.contract(x, self.order)[0])
    }

    /// Returns `(T x^{⊗p−1}, T x^{⊗p})`; the scalar is the dot product of the
    /// vector with `x`, bit-identical to [`apply_full`](Self::apply_full).
    pub(crate) fn partial_and_full(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let g = self.contract(x, self.order - 1);
        let f = g.iter().zip(x).fold(0.0, |acc, (a, b)| acc + a * b);
        (g, f)
    }

    /// Contracts the trailing `times` modes with `x`, summing sequentially
    /// in index order.
    fn contract(&self, x: &[f64], times: usize) -> Vec<f64> {
        let n = self.dim;
        let mut buf: Vec<f64> = contract_last(&self.data, x, n);
        for _ in 1..times {
            buf = contract_last(&buf, x, n);
        }
        buf
    }

    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| acc + a * b))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, a| acc + a * a).sqrt()
    }

    fn check_vector(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.order != other.order || self.dim != other.dim {
            return Err(Error::Shape(self.order, self.dim, other.order, other.dim));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn contract_last(src: &[f64], x: &[f64], n: usize) -> Vec<f64> {
    src.chunks_exact(n)
        .map(|row| row.iter().zip(x).fold(0.0, |acc, (a, b)| acc + a * b))
        .collect()
}

/// `v_{i_1} ⋯ v_{i_p}` multiplied in sorted index order.
fn sorted_product(v: &[f64], offset: usize, dim: usize, idx: &mut [usize]) -> f64 {
    decode(offset, dim, idx);
    idx.sort_unstable();
    idx.iter().fold(1.0, |acc, &i| acc * v[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_permutation_average() {
        let t = SymmetricTensor::symmetrize(&[0.0, 1.0, 0.0, 0.0], 2, 2).unwrap();
        assert_eq!(t.data(), &[0.0, 0.5, 0.5, 0.0]);
    }

    #[test]
    fn symmetrize_is_idempotent() {
        let raw: Vec<f64> = (0..27).map(|i| (i as f64 * 0.37).sin()).collect();
        let t = SymmetricTensor::symmetrize(&raw, 3, 3).unwrap();
        let again = SymmetricTensor::symmetrize(t.data(), 3, 3).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn symmetrize_errors() {
        assert!(matches!(
            SymmetricTensor::symmetrize(&[0.0; 7], 3, 2),
            Err(Error::Dimension {
                expected: 8,
                got: 7
            })
        ));
        let mut raw = vec![0.0; 8];
        raw[3] = f64::INFINITY;
        assert!(matches!(
            SymmetricTensor::symmetrize(&raw, 3, 2),
            Err(Error::NonFinite(3))
        ));
        assert!(SymmetricTensor::zeros(7, 2).is_err());
        assert!(SymmetricTensor::zeros(1, 2).is_err());
        assert!(matches!(
            SymmetricTensor::zeros(6, 20),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn rank_one_basis_vector() {
        let e1 = UnitVector::basis(2, 0);
        let t = SymmetricTensor::rank_one(1.0, &e1, 3).unwrap();
        let mut expected = vec![0.0; 8];
        expected[0] = 1.0;
        assert_eq!(t.data(), expected.as_slice());
    }

    #[test]
    fn rank_one_norm_is_abs_lambda() {
        let v = UnitVector::normalize(vec![0.3, -1.2, 0.7, 2.0]).unwrap();
        let t = SymmetricTensor::rank_one(-7.0, &v, 3).unwrap();
        assert!((t.frobenius_norm() - 7.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_sum_of_axes() {
        let pairs: Vec<_> = (0..5).map(|i| UnitVector::basis(5, i)).collect();
        let t = SymmetricTensor::from_pairs(3, 5, pairs.iter().map(|v| (300.0, v))).unwrap();
        for i in 0..5 {
            assert_eq!(t.get(&[i, i, i]), 300.0);
        }
        assert_eq!(t.data().iter().filter(|&&x| x != 0.0).count(), 5);
    }

    #[test]
    fn experiment_three_form_value() {
        let mut pairs = vec![(1000.0, UnitVector::basis(5, 0))];
        pairs.extend((1..5).map(|i| (100.0, UnitVector::basis(5, i))));
        let t = SymmetricTensor::from_pairs(3, 5, pairs.iter().map(|(l, v)| (*l, v))).unwrap();
        let x = [0.5, 0.0, 3f64.sqrt() / 2.0, 0.0, 0.0];
        let value = t.apply_full(&x).unwrap();
        let expected = 1000.0 * 0.125 + 100.0 * (3f64.sqrt() / 2.0).powi(3);
        assert!((value - expected).abs() < 1e-10);
        assert!((value - 189.95).abs() < 0.005);
    }

    #[test]
    fn sod_partial_contraction_returns_scaled_vector() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v1 = UnitVector::from_unit(vec![s, s]).unwrap();
        let v2 = UnitVector::from_unit(vec![s, -s]).unwrap();
        let t = SymmetricTensor::from_pairs(3, 2, [(4.0, &v1), (-2.0, &v2)]).unwrap();
        let g = t.apply_partial(&v2).unwrap();
        assert!((g[0] + 2.0 * s).abs() < 1e-14 && (g[1] - 2.0 * s).abs() < 1e-14);
        assert!((t.apply_full(&v1).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn inner_of_rank_ones_is_power_of_overlap() {
        let u = UnitVector::normalize(vec![1.0, 2.0, -1.0]).unwrap();
        let v = UnitVector::normalize(vec![0.5, -0.1, 3.0]).unwrap();
        let a = SymmetricTensor::rank_one(1.0, &u, 4).unwrap();
        let b = SymmetricTensor::rank_one(1.0, &v, 4).unwrap();
        let expected = u.dot(&v).powi(4);
        assert!((a.inner(&b).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn dimension_and_shape_errors() {
        let t = SymmetricTensor::zeros(3, 3).unwrap();
        assert!(t.apply_full(&[1.0, 2.0]).is_err());
        assert!(t.apply_partial(&[1.0; 4]).is_err());
        let u = SymmetricTensor::zeros(3, 2).unwrap();
        assert!(matches!(t.inner(&u), Err(Error::Shape(..))));
    }

    #[test]
    fn json_rejects_asymmetric_and_resymmetrizes() {
        let good = r#"{"order":2,"dim":2,"data":[1.0,0.5,0.5000000000001,2.0]}"#;
        let t = SymmetricTensor::from_json(good).unwrap();
        assert_eq!(t.get(&[0, 1]), t.get(&[1, 0]));
        let bad = r#"{"order":2,"dim":2,"data":[1.0,0.5,0.6,2.0]}"#;
        assert!(SymmetricTensor::from_json(bad).is_err());
        let back = SymmetricTensor::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(t, back);
    }
}
