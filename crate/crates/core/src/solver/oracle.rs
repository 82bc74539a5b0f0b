//! Exhaustive search for tiny dimensions (`n ≤ 3`), independent of the
//! power ascent. Used to validate the local solvers.
//!
//! The maximizer of `|T v^{⊗p}|` over the feasible set is either interior
//! (found by a dense angular grid and compass polish), on a single slab
//! boundary (a circle or a point pair, searched by its own grid and polish),
//! or at the intersection of two boundaries (enumerated in closed form).

use super::ConstraintSet;
use crate::error::{Error, Result};
use crate::tensor::{dot, norm2, EigenPair, SymmetricTensor, UnitVector};

const STRICT_SLACK: f64 = 1e-12;

/// Best feasible `(λ, v)` maximizing `|T v^{⊗p}|`, by brute force.
pub fn brute_force_rank_one(
    t: &SymmetricTensor,
    cs: &ConstraintSet,
    grid_points: usize,
) -> Result<EigenPair> {
    let dim = t.dim();
    if dim > 3 {
        return Err(Error::UnsupportedSize(dim));
    }
    if grid_points < 100 {
        return Err(Error::Config(format!(
            "grid_points must be at least 100, got {grid_points}"
        )));
    }
    cs.check_dim(dim)?;
    let mut search = Search { t, cs, best: None };
    match dim {
        1 => {
            search.offer(&[1.0]);
            search.offer(&[-1.0]);
        }
        2 => search.circle(&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], 1.0, grid_points),
        _ => search.sphere(grid_points),
    }
    if dim >= 2 {
        search.boundaries(grid_points);
    }
    let (_, v) = search.best.ok_or(Error::Infeasible {
        theta: cs.theta(),
        anchors: cs.anchors().len(),
    })?;
    let mut vector = UnitVector::normalize(v)?;
    let mut value = t.apply_full(&vector)?;
    // Odd orders: report the sign-flipped maximizer with a nonnegative value.
    if t.order() % 2 == 1 && value < 0.0 {
        vector = vector.negated();
        value = -value;
    }
    EigenPair::new(value, vector)
}

struct Search<'a> {
    t: &'a SymmetricTensor,
    cs: &'a ConstraintSet,
    best: Option<(f64, Vec<f64>)>,
}

impl Search<'_> {
    fn score(&self, v: &[f64]) -> Option<f64> {
        if !self.cs.is_feasible(v, STRICT_SLACK) {
            return None;
        }
        self.t.apply_full(v).ok().map(f64::abs)
    }

    fn offer(&mut self, v: &[f64]) {
        if let Some(s) = self.score(v) {
            if self.best.as_ref().is_none_or(|(b, _)| s > *b) {
                self.best = Some((s, v.to_vec()));
            }
        }
    }

    /// Grid and polish on `center + radius (cos t · u + sin t · w)`.
    fn circle(&mut self, center: &[f64], u: &[f64], w: &[f64], radius: f64, grid: usize) {
        let point = |t: f64| -> Vec<f64> {
            center
                .iter()
                .zip(u.iter().zip(w))
                .map(|(c, (a, b))| c + radius * (t.cos() * a + t.sin() * b))
                .collect()
        };
        let h = std::f64::consts::TAU / grid as f64;
        let mut seeds: Vec<(f64, f64)> = (0..grid)
            .map(|k| k as f64 * h)
            .filter_map(|t| self.score(&point(t)).map(|s| (s, t)))
            .collect();
        seeds.sort_by(|a, b| b.0.total_cmp(&a.0));
        // Polish the few best grid cells; distinct local maxima can be close in value.
        for &(_, t0) in seeds.iter().take(8) {
            let t = compass(|p| self.score(&point(p[0])), &[t0], h);
            self.offer(&point(t[0]));
        }
    }

    fn sphere(&mut self, grid: usize) {
        let point = |a: &[f64]| -> Vec<f64> {
            let (phi, psi) = (a[0], a[1]);
            vec![psi.cos() * phi.cos(), psi.cos() * phi.sin(), psi.sin()]
        };
        let h = std::f64::consts::TAU / grid as f64;
        let rows = grid / 2;
        let mut seeds: Vec<(f64, [f64; 2])> = Vec::new();
        for j in 0..=rows {
            let psi = -std::f64::consts::FRAC_PI_2 + j as f64 * std::f64::consts::PI / rows as f64;
            for k in 0..grid {
                let a = [k as f64 * h, psi];
                if let Some(s) = self.score(&point(&a)) {
                    seeds.push((s, a));
                }
            }
        }
        seeds.sort_by(|a, b| b.0.total_cmp(&a.0));
        for &(_, a0) in seeds.iter().take(8) {
            let a = compass(|a| self.score(&point(a)), &a0, h);
            self.offer(&point(&a));
        }
    }

    /// Slab boundaries `⟨v, a_i⟩ = ±θ` and pairwise intersections.
    fn boundaries(&mut self, grid: usize) {
        let anchors = self.cs.anchors();
        let theta = self.cs.theta();
        let dim = self.t.dim();
        let radius = (1.0 - theta * theta).max(0.0).sqrt();
        for a in anchors {
            let basis = complement_basis(a);
            for s in [1.0, -1.0] {
                let center: Vec<f64> = a.iter().map(|x| s * theta * x).collect();
                if dim == 2 {
                    for sign in [1.0, -1.0] {
                        let v: Vec<f64> = center
                            .iter()
                            .zip(&basis[0])
                            .map(|(c, b)| c + sign * radius * b)
                            .collect();
                        self.offer(&v);
                    }
                } else {
                    self.circle(&center, &basis[0], &basis[1], radius, grid);
                }
            }
        }
        if dim == 3 {
            for i in 0..anchors.len() {
                for j in (i + 1)..anchors.len() {
                    for si in [1.0, -1.0] {
                        for sj in [1.0, -1.0] {
                            for v in
                                two_slab_points(&anchors[i], &anchors[j], si * theta, sj * theta)
                            {
                                self.offer(&v);
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Orthonormal basis of the complement of `a` (dimension 2 or 3).
fn complement_basis(a: &[f64]) -> Vec<Vec<f64>> {
    let dim = a.len();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for i in 0..dim {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        for b in std::iter::once(a).chain(out.iter().map(|v| v.as_slice())) {
            let c = dot(&e, b);
            e.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let ne = norm2(&e);
        if ne > 1e-6 {
            e.iter_mut().for_each(|x| *x /= ne);
            out.push(e);
        }
        if out.len() == dim - 1 {
            break;
        }
    }
    out
}

/// Unit vectors in R^3 with `⟨v, a⟩ = r_a` and `⟨v, b⟩ = r_b`.
fn two_slab_points(a: &[f64], b: &[f64], ra: f64, rb: f64) -> Vec<Vec<f64>> {
    let d = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let nd = norm2(&d);
    if nd < 1e-9 {
        return Vec::new();
    }
    // y0 = α a + β b with Gram system.
    let ab = dot(a, b);
    let det = 1.0 - ab * ab;
    let alpha = (ra - ab * rb) / det;
    let beta = (rb - ab * ra) / det;
    let y0: Vec<f64> = a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect();
    let r0 = dot(&y0, &y0);
    if r0 > 1.0 {
        return Vec::new();
    }
    let tau = (1.0 - r0).sqrt() / nd;
    [1.0, -1.0]
        .iter()
        .map(|s| y0.iter().zip(&d).map(|(y, di)| y + s * tau * di).collect())
        .collect()
}

/// Maximizes `score` by compass search from `x0`, halving the step until
/// it drops below `1e-13`. Infeasible points score `None` and are rejected.
fn compass(score: impl Fn(&[f64]) -> Option<f64>, x0: &[f64], h0: f64) -> Vec<f64> {
    let mut x = x0.to_vec();
    let Some(mut best) = score(&x) else {
        return x;
    };
    let mut h = h0;
    let dim = x.len();
    let dirs: Vec<Vec<f64>> = if dim == 1 {
        vec![vec![1.0], vec![-1.0]]
    } else {
        (0..8)
            .map(|k| {
                let a = k as f64 * std::f64::consts::FRAC_PI_4;
                vec![a.cos(), a.sin()]
            })
            .collect()
    };
    while h > 1e-13 {
        let mut moved = false;
        for d in &dirs {
            let cand: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + h * di).collect();
            if let Some(s) = score(&cand) {
                if s > best {
                    best = s;
                    x = cand;
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_rank_one() {
        let v = UnitVector::normalize(vec![0.3, -0.5, 0.8]).unwrap();
        let t = SymmetricTensor::rank_one(3.0, &v, 3).unwrap();
        let pair = brute_force_rank_one(&t, &ConstraintSet::unconstrained(), 200).unwrap();
        assert!((pair.value - 3.0).abs() < 1e-9, "{pair:?}");
        assert!(pair.vector.sign_invariant_distance(&v) < 1e-5);
    }

    #[test]
    fn equality_slice_is_orthogonal() {
        let raw: Vec<f64> = (0..27).map(|i| ((i * 5 % 11) as f64 - 5.0) / 4.0).collect();
        let t = SymmetricTensor::symmetrize(&raw, 3, 3).unwrap();
        let cs = ConstraintSet::new(vec![UnitVector::basis(3, 0)], 0.0).unwrap();
        let pair = brute_force_rank_one(&t, &cs, 200).unwrap();
        assert!(pair.vector[0].abs() <= 1e-12);
    }

    #[test]
    fn rejects_large_dim_and_coarse_grid() {
        let t = SymmetricTensor::zeros(3, 4).unwrap();
        assert!(matches!(
            brute_force_rank_one(&t, &ConstraintSet::unconstrained(), 200),
            Err(Error::UnsupportedSize(4))
        ));
        let t = SymmetricTensor::zeros(3, 2).unwrap();
        assert!(brute_force_rank_one(&t, &ConstraintSet::unconstrained(), 10).is_err());
    }

    #[test]
    fn two_slab_points_satisfy_both() {
        let a = [1.0, 0.0, 0.0];
        let b = [0.0, 1.0, 0.0];
        for v in two_slab_points(&a, &b, 0.3, -0.4) {
            assert!((dot(&v, &a) - 0.3).abs() < 1e-15);
            assert!((dot(&v, &b) + 0.4).abs() < 1e-15);
            assert!((norm2(&v) - 1.0).abs() < 1e-15);
        }
    }
}
