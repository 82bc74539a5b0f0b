use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::EigenPair;

/// Permutation-and-sign alignment between a ground truth and an estimate.
///
/// `permutation[j]` is the truth index matched to estimated component `j`.
/// `signs[j]` is `+1` when `v̂_j` is closer to `v_{π(j)}` than to its
/// negation. Errors follow the sign-invariant definitions
/// `min{|λ_{π(j)} ∓ λ̂_j|}` and `min{‖v_{π(j)} ∓ v̂_j‖}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub permutation: Vec<usize>,
    pub signs: Vec<i8>,
    pub value_errors: Vec<f64>,
    pub vector_errors: Vec<f64>,
}

impl MatchReport {
    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }

    pub fn max_value_error(&self) -> f64 {
        self.value_errors.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_vector_error(&self) -> f64 {
        self.vector_errors.iter().copied().fold(0.0, f64::max)
    }

    /// Builds the report for a given permutation.
    pub fn for_permutation(
        truth: &[EigenPair],
        est: &[EigenPair],
        permutation: Vec<usize>,
    ) -> Self {
        let mut signs = Vec::with_capacity(est.len());
        let mut value_errors = Vec::with_capacity(est.len());
        let mut vector_errors = Vec::with_capacity(est.len());
        for (j, e) in est.iter().enumerate() {
            let t = &truth[permutation[j]];
            let minus = t.vector.distance(&e.vector);
            let plus = t.vector.distance(&e.vector.negated());
            signs.push(if minus <= plus { 1 } else { -1 });
            vector_errors.push(minus.min(plus));
            value_errors.push((t.value - e.value).abs().min((t.value + e.value).abs()));
        }
        Self {
            permutation,
            signs,
            value_errors,
            vector_errors,
        }
    }
}

fn check_lengths(truth: &[EigenPair], est: &[EigenPair]) -> Result<()> {
    if truth.len() != est.len() {
        return Err(Error::Dimension {
            expected: truth.len(),
            got: est.len(),
        });
    }
    Ok(())
}

/// Greedy alignment on the overlap magnitudes `|⟨v_i, v̂_j⟩|`, largest first.
pub fn match_components(truth: &[EigenPair], est: &[EigenPair]) -> Result<MatchReport> {
    check_lengths(truth, est)?;
    let n = truth.len();
    let mut overlaps: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for (i, t) in truth.iter().enumerate() {
        for (j, e) in est.iter().enumerate() {
            overlaps.push((t.vector.dot(&e.vector).abs(), i, j));
        }
    }
    // Stable sort keeps (i, j) order among equal overlaps.
    overlaps.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut perm = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for (_, i, j) in overlaps {
        if perm[j] == usize::MAX && !taken[i] {
            perm[j] = i;
            taken[i] = true;
        }
    }
    Ok(MatchReport::for_permutation(truth, est, perm))
}

/// Alignment minimizing the largest vector error over all `n!` permutations
/// (ties broken by the sum of vector errors). Intended for `n ≤ 8`.
pub fn exhaustive_match(truth: &[EigenPair], est: &[EigenPair]) -> Result<MatchReport> {
    check_lengths(truth, est)?;
    let n = truth.len();
    if n > 8 {
        return Err(Error::UnsupportedSize(n));
    }
    let cost: Vec<Vec<f64>> = est
        .iter()
        .map(|e| {
            truth
                .iter()
                .map(|t| t.vector.sign_invariant_distance(&e.vector))
                .collect()
        })
        .collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<((f64, f64), Vec<usize>)> = None;
    heap_permutations(&mut perm, n, &mut |p| {
        let (mx, sum) = p.iter().enumerate().fold((0.0f64, 0.0), |(m, s), (j, &i)| {
            (m.max(cost[j][i]), s + cost[j][i])
        });
        let better = match &best {
            None => true,
            Some(((bm, bs), _)) => mx < *bm || (mx == *bm && sum < *bs),
        };
        if better {
            best = Some(((mx, sum), p.to_vec()));
        }
    });
    let perm = best.map(|(_, p)| p).unwrap_or_default();
    Ok(MatchReport::for_permutation(truth, est, perm))
}

fn heap_permutations(a: &mut [usize], k: usize, visit: &mut impl FnMut(&[usize])) {
    if k <= 1 {
        visit(a);
        return;
    }
    for i in 0..k {
        heap_permutations(a, k - 1, visit);
        if k.is_multiple_of(2) {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::UnitVector;

    fn axes(n: usize, values: &[f64]) -> Vec<EigenPair> {
        (0..n)
            .map(|i| EigenPair::new(values[i], UnitVector::basis(n, i)).unwrap())
            .collect()
    }

    #[test]
    fn shuffled_and_flipped() {
        let truth = axes(3, &[3.0, 2.0, 1.0]);
        let est = vec![
            EigenPair::new(-1.0, truth[2].vector.negated()).unwrap(),
            truth[0].clone(),
            EigenPair::new(2.0, truth[1].vector.negated()).unwrap(),
        ];
        let r = match_components(&truth, &est).unwrap();
        assert_eq!(r.permutation, vec![2, 0, 1]);
        assert_eq!(r.signs, vec![-1, 1, -1]);
        assert!(r.value_errors.iter().all(|&e| e == 0.0));
        assert!(r.vector_errors.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn single_pair_sign_flip() {
        let truth = axes(1, &[2.0]);
        let est = vec![EigenPair::new(2.0, truth[0].vector.negated()).unwrap()];
        let r = match_components(&truth, &est).unwrap();
        assert_eq!(r.vector_errors, vec![0.0]);
        assert_eq!(r.signs, vec![-1]);
    }

    #[test]
    fn length_mismatch() {
        let truth = axes(2, &[1.0, 1.0]);
        assert!(match_components(&truth, &truth[..1]).is_err());
        assert!(exhaustive_match(&truth, &truth[..1]).is_err());
    }

    #[test]
    fn exhaustive_agrees_on_clean_case() {
        let truth = axes(4, &[1.0, 2.0, 3.0, 4.0]);
        let mut est = truth.clone();
        est.reverse();
        let a = match_components(&truth, &est).unwrap();
        let b = exhaustive_match(&truth, &est).unwrap();
        assert_eq!(a, b);
    }
}
