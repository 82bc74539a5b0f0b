//! Shifted power ascent on `s · T x^{⊗p}` over the feasible set.
//!
//! Each step maximizes the linearization `⟨s·T x^{⊗p−1} + α x, y⟩` over the
//! feasible set. With `α` large enough the shifted form is convex and the
//! step never decreases the objective; `α` starts at the configured shift
//! and is doubled whenever a step would decrease the objective, then relaxed
//! by half after each accepted step.

use super::{ConstraintSet, SolverConfig};
use crate::error::Result;
use crate::tensor::{norm2, SymmetricTensor};

pub(super) struct Outcome {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub restart: usize,
}

impl Outcome {
    pub fn with_restart(mut self, restart: usize) -> Self {
        self.restart = restart;
        self
    }
}

/// Largest step length still counted as "at a fixed point".
const STEP_TOL: f64 = 1e-6;

pub(super) fn run(
    t: &SymmetricTensor,
    cs: &ConstraintSet,
    mut x: Vec<f64>,
    sign: f64,
    cfg: &SolverConfig,
) -> Result<Outcome> {
    let scale = t.frobenius_norm();
    let alpha_floor = cfg.shift;
    let alpha_bump = 1e-3 * scale;
    let alpha_cap = 1e6 * scale.max(f64::MIN_POSITIVE) * t.order() as f64;
    let slack = 1e-13 * scale;

    let (mut g, mut f) = t.partial_and_full(&x);
    // Odd orders: the feasible set is symmetric and f(−x) = −f(x).
    if t.order() % 2 == 1 && sign * f < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
        g.iter_mut().for_each(|v| *v = -*v);
        f = -f;
    }
    let mut alpha = alpha_floor;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iters {
        iterations += 1;
        let c: Vec<f64> = g
            .iter()
            .zip(&x)
            .map(|(gi, xi)| sign * gi + alpha * xi)
            .collect();
        let y = cs.maximize_linear(&c, &x)?;
        let (gy, fy) = t.partial_and_full(&y);
        if sign * fy < sign * f - slack {
            if alpha >= alpha_cap {
                break;
            }
            alpha = if alpha < alpha_bump {
                alpha_bump
            } else {
                2.0 * alpha
            };
            continue;
        }
        let step = norm2(&y.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>());
        x = y;
        g = gy;
        f = fy;
        alpha = (0.5 * alpha).max(alpha_floor);
        let residual = cs.kkt_residual(&x, &g);
        if residual <= cfg.tol && step <= STEP_TOL {
            converged = true;
            break;
        }
        if step == 0.0 {
            break;
        }
    }

    Ok(Outcome {
        x,
        objective: f,
        iterations,
        converged,
        restart: 0,
    })
}
