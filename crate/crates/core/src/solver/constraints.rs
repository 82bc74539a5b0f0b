//! Near-orthogonality constraints `|⟨v, a_i⟩| ≤ θ` and the linear
//! maximization step over `{‖v‖ = 1} ∩ slabs` used by the ascent.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{dot, norm2, UnitVector};

/// Slack allowed on slab constraints when checking feasibility.
pub const FEASIBILITY_SLACK: f64 = 1e-9;
/// A constraint counts as active when `|⟨v, a⟩|` is within this of `θ`.
pub const ACTIVE_TOL: f64 = 1e-8;

/// Largest anchor count for which exhaustive active-set enumeration is used.
const MAX_ENUMERATED_ANCHORS: usize = 12;

/// Anchors `a_i` and slab width `θ`.
///
/// `θ = 0` turns the slabs into equality constraints `⟨v, a_i⟩ = 0`, handled
/// by optimizing inside the orthogonal complement of the anchors. An empty
/// anchor list gives the unconstrained problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    anchors: Vec<UnitVector>,
    theta: f64,
}

impl ConstraintSet {
    pub fn new(anchors: Vec<UnitVector>, theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::Config(format!("theta {theta} outside [0, 1]")));
        }
        if let Some(first) = anchors.first() {
            let dim = first.dim();
            if let Some(bad) = anchors.iter().find(|a| a.dim() != dim) {
                return Err(Error::Dimension {
                    expected: dim,
                    got: bad.dim(),
                });
            }
        }
        Ok(Self { anchors, theta })
    }

    pub fn unconstrained() -> Self {
        Self {
            anchors: Vec::new(),
            theta: 1.0,
        }
    }

    pub fn anchors(&self) -> &[UnitVector] {
        &self.anchors
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    pub fn is_equality(&self) -> bool {
        !self.anchors.is_empty() && self.theta == 0.0
    }

    pub fn is_feasible(&self, v: &[f64], slack: f64) -> bool {
        self.anchors
            .iter()
            .all(|a| a.dot(v).abs() <= self.theta + slack)
    }

    /// Indices of anchors whose slab is (numerically) tight at `v`.
    pub fn active(&self, v: &[f64]) -> Vec<usize> {
        self.anchors
            .iter()
            .enumerate()
            .filter(|(_, a)| self.is_equality() || a.dot(v).abs() >= self.theta - ACTIVE_TOL)
            .map(|(i, _)| i)
            .collect()
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        match self.anchors.first() {
            Some(a) if a.dim() != dim => Err(Error::Dimension {
                expected: dim,
                got: a.dim(),
            }),
            _ => Ok(()),
        }
    }

    /// Component of `g` orthogonal to `v` and the active anchors at `v`.
    ///
    /// Zero exactly when `g = μ v + Σ_{active} ν_i a_i`, the first-order
    /// condition on the constraint manifold.
    pub fn kkt_residual(&self, v: &[f64], g: &[f64]) -> f64 {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let push = |w: &[f64], basis: &mut Vec<Vec<f64>>| {
            let mut u = w.to_vec();
            for _ in 0..2 {
                for b in basis.iter() {
                    let c = dot(&u, b);
                    u.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let nu = norm2(&u);
            if nu > 1e-10 {
                u.iter_mut().for_each(|x| *x /= nu);
                basis.push(u);
            }
        };
        push(v, &mut basis);
        for i in self.active(v) {
            push(&self.anchors[i], &mut basis);
        }
        let mut r = g.to_vec();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&r, b);
                r.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        norm2(&r)
    }

    /// Returns a maximizer of `⟨c, y⟩` over the feasible set.
    ///
    /// Falls back to `current` when `c` vanishes. The maximization over
    /// `{‖y‖ ≤ 1} ∩ slabs` is convex and attains its maximum on the sphere,
    /// so the returned point is feasible for the sphere-constrained problem.
    pub fn maximize_linear(&self, c: &[f64], current: &[f64]) -> Result<Vec<f64>> {
        let nc = norm2(c);
        if self.anchors.is_empty() {
            return Ok(if nc > 0.0 {
                c.iter().map(|x| x / nc).collect()
            } else {
                current.to_vec()
            });
        }
        if self.theta == 0.0 {
            return self.maximize_in_complement(c, current);
        }
        if nc == 0.0 {
            return Ok(current.to_vec());
        }
        let y: Vec<f64> = c.iter().map(|x| x / nc).collect();
        if self.is_feasible(&y, 1e-12) {
            return Ok(y);
        }
        if let Some(y) = self.active_set(c) {
            return Ok(y);
        }
        self.enumerate(c)
    }

    fn maximize_in_complement(&self, c: &[f64], current: &[f64]) -> Result<Vec<f64>> {
        let all: Vec<usize> = (0..self.anchors.len()).collect();
        let proj = Projector::new(&self.anchors, &all).ok_or(Error::Infeasible {
            theta: self.theta,
            anchors: self.anchors.len(),
        })?;
        let dim = c.len();
        let candidates = std::iter::once(c.to_vec())
            .chain(std::iter::once(current.to_vec()))
            .chain((0..dim).map(|i| {
                let mut e = vec![0.0; dim];
                e[i] = 1.0;
                e
            }));
        for w in candidates {
            let p = proj.complement(&w);
            let np = norm2(&p);
            if np > 1e-10 * norm2(&w).max(1e-300) && np > 0.0 {
                return Ok(p.iter().map(|x| x / np).collect());
            }
        }
        Err(Error::Infeasible {
            theta: 0.0,
            anchors: self.anchors.len(),
        })
    }

    /// Primal active-set iteration. Returns `None` when it fails to settle,
    /// in which case the caller enumerates.
    fn active_set(&self, c: &[f64]) -> Option<Vec<f64>> {
        let k = self.anchors.len();
        let mut set: Vec<(usize, f64)> = Vec::new();
        let nc = norm2(c);
        let mut y: Vec<f64> = c.iter().map(|x| x / nc).collect();
        let mut multipliers: Vec<f64> = Vec::new();
        for _ in 0..(4 * k + 8) {
            let violated = self
                .anchors
                .iter()
                .enumerate()
                .filter(|(i, _)| !set.iter().any(|(j, _)| j == i))
                .map(|(i, a)| (i, a.dot(&y)))
                .filter(|(_, o)| o.abs() > self.theta + 1e-12)
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()));
            if let Some((i, o)) = violated {
                set.push((i, o.signum()));
            } else {
                let worst = multipliers
                    .iter()
                    .zip(&set)
                    .enumerate()
                    .map(|(pos, (nu, (_, s)))| (pos, nu * s))
                    .filter(|(_, m)| *m < -1e-12 * nc)
                    .min_by(|a, b| a.1.total_cmp(&b.1));
                match worst {
                    Some((pos, _)) => {
                        set.remove(pos);
                    }
                    None => return Some(y),
                }
            }
            if set.is_empty() {
                y = c.iter().map(|x| x / nc).collect();
                multipliers.clear();
                continue;
            }
            let cand = self.equality_candidate(c, &set)?;
            // A tight ball constraint leaves the multipliers undetermined.
            cand.mu?;
            y = cand.y;
            multipliers = cand.nu;
        }
        None
    }

    fn enumerate(&self, c: &[f64]) -> Result<Vec<f64>> {
        let k = self.anchors.len();
        if k > MAX_ENUMERATED_ANCHORS {
            return Err(Error::Config(format!(
                "active-set search did not settle and {k} anchors is too many to enumerate"
            )));
        }
        let total = 3usize.pow(k as u32);
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut set = Vec::with_capacity(k);
        for code in 1..total {
            set.clear();
            let mut rest = code;
            for i in 0..k {
                match rest % 3 {
                    1 => set.push((i, 1.0)),
                    2 => set.push((i, -1.0)),
                    _ => {}
                }
                rest /= 3;
            }
            let Some(cand) = self.equality_candidate(c, &set) else {
                continue;
            };
            if !self.is_feasible(&cand.y, 1e-12) {
                continue;
            }
            let value = dot(c, &cand.y);
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, cand.y));
            }
        }
        best.map(|(_, y)| y).ok_or(Error::Infeasible {
            theta: self.theta,
            anchors: k,
        })
    }

    /// Maximizer of `⟨c, y⟩` on `{‖y‖ = 1, ⟨a_i, y⟩ = s_i θ for (i, s_i) ∈ set}`.
    fn equality_candidate(&self, c: &[f64], set: &[(usize, f64)]) -> Option<Candidate> {
        let idx: Vec<usize> = set.iter().map(|(i, _)| *i).collect();
        let proj = Projector::new(&self.anchors, &idx)?;
        let rhs = DVector::from_iterator(set.len(), set.iter().map(|(_, s)| s * self.theta));
        let w = proj.solve(&rhs);
        let y0 = proj.combine(&w);
        let r0 = dot(&y0, &y0);
        if r0 > 1.0 + 1e-12 {
            return None;
        }
        let t = (1.0 - r0).max(0.0).sqrt();
        let z = proj.solve(&proj.apply(c));
        let cc = proj.combine(&z);
        let pc: Vec<f64> = c.iter().zip(&cc).map(|(a, b)| a - b).collect();
        let npc = norm2(&pc);
        let dir: Vec<f64> = if npc > 1e-14 * norm2(c) {
            pc.iter().map(|x| x / npc).collect()
        } else {
            // Objective is flat on the circle; any null-space direction works.
            let dim = c.len();
            let best = (0..dim)
                .map(|i| {
                    let mut e = vec![0.0; dim];
                    e[i] = 1.0;
                    proj.complement(&e)
                })
                .max_by(|a, b| norm2(a).total_cmp(&norm2(b)))?;
            let nb = norm2(&best);
            if nb < 1e-10 {
                if t > 1e-12 {
                    return None;
                }
                vec![0.0; dim]
            } else {
                best.iter().map(|x| x / nb).collect()
            }
        };
        let y: Vec<f64> = y0.iter().zip(&dir).map(|(a, d)| a + t * d).collect();
        let mu = (t > 1e-12 && npc > 1e-14 * norm2(c)).then(|| npc / t);
        let nu = match mu {
            Some(mu) => z
                .iter()
                .zip(w.iter())
                .map(|(zi, wi)| zi - mu * wi)
                .collect(),
            None => Vec::new(),
        };
        Some(Candidate { y, mu, nu })
    }
}

struct Candidate {
    y: Vec<f64>,
    mu: Option<f64>,
    nu: Vec<f64>,
}

/// Least-squares machinery for a subset of anchors: `G = A Aᵀ` factorized.
struct Projector {
    rows: DMatrix<f64>,
    gram: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl Projector {
    fn new(anchors: &[UnitVector], idx: &[usize]) -> Option<Self> {
        let dim = anchors.first()?.dim();
        let rows = DMatrix::from_fn(idx.len(), dim, |r, c| anchors[idx[r]][c]);
        let gram = &rows * rows.transpose();
        // Reject (nearly) dependent anchor subsets.
        let min_diag = gram.diagonal().min();
        let chol = nalgebra::Cholesky::new(gram)?;
        let l = chol.l_dirty();
        let min_pivot = (0..idx.len())
            .map(|i| l[(i, i)])
            .fold(f64::INFINITY, f64::min);
        if min_pivot * min_pivot < 1e-12 * min_diag {
            return None;
        }
        Some(Self { rows, gram: chol })
    }

    fn apply(&self, v: &[f64]) -> DVector<f64> {
        &self.rows * DVector::from_column_slice(v)
    }

    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        self.gram.solve(rhs)
    }

    fn combine(&self, w: &DVector<f64>) -> Vec<f64> {
        (self.rows.transpose() * w).as_slice().to_vec()
    }

    fn complement(&self, v: &[f64]) -> Vec<f64> {
        let w = self.solve(&self.apply(v));
        let back = self.combine(&w);
        v.iter().zip(&back).map(|(a, b)| a - b).collect()
    }
}
