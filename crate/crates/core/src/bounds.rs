//! Admissibility conditions and perturbation bounds for the greedy drivers,
//! and checks of computed decompositions against them.
//!
//! | theorem | eigenvalue bound | eigenvector bound | regime |
//! |---|---|---|---|
//! | RD | `2ε` | `20ε/|λ|` | `ε ≤ c·λ_min/n^{1/(p−1)}`, `c` unspecified |
//! | CD | `ε` | `(6.2 + 4κ)ε/|λ|` | `θ ≤ 1/(2κ)`, `ε ≤ θ²λ_min/12.5` |
//! | ADA | `ε` | `(6.2 + 4κ)ε/|λ|` | `ε ≤ λ_min/(70κ²)`; also `θ_n > 0.96/(2κ)` |
//! | RANK1 | `ε` | `10(ε/|λ| + (ε/λ)²)` | first extracted pair only |

use serde::{Deserialize, Serialize};

use crate::decomposition::{exhaustive_match, match_components, Decomposition, MatchReport};
use crate::error::{Error, Result};
use crate::tensor::EigenPair;

/// Absolute slack added to every bound before comparing, so that exact
/// recovery (`ε = 0`) passes despite rounding.
pub const BOUND_SLACK: f64 = 1e-9;
/// Default for the unspecified constant in the residual-deflation regime.
pub const RD_DEFAULT_C: f64 = 1.0 / 20.0;
/// Largest size for which a failed check is retried with exhaustive alignment.
pub const EXHAUSTIVE_RETRY_MAX_N: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub kappa: f64,
    pub n: usize,
    pub p: usize,
}

impl SpectralSummary {
    pub fn from_values(values: &[f64], order: usize) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("no eigenvalues".into()));
        }
        let lambda_min = values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        let lambda_max = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if !(lambda_min > 0.0 && lambda_max.is_finite()) {
            return Err(Error::Domain(
                "eigenvalues must be finite and nonzero".into(),
            ));
        }
        Ok(Self {
            lambda_min,
            lambda_max,
            kappa: lambda_max / lambda_min,
            n: values.len(),
            p: order,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleParams {
    /// `1/(2κ)`.
    pub theta_max: f64,
    /// `λ_min/(70κ²)`.
    pub eps_max_ada: f64,
    lambda_min: f64,
}

impl AdmissibleParams {
    /// `θ² λ_min / 12.5`.
    pub fn eps_max_cd(&self, theta: f64) -> f64 {
        theta * theta * self.lambda_min / 12.5
    }
}

pub fn admissible_params(s: &SpectralSummary) -> AdmissibleParams {
    AdmissibleParams {
        theta_max: 1.0 / (2.0 * s.kappa),
        eps_max_ada: s.lambda_min / (70.0 * s.kappa * s.kappa),
        lambda_min: s.lambda_min,
    }
}

/// `c · λ_min / n^{1/(p−1)}`.
pub fn rd_eps_threshold(s: &SpectralSummary, c: f64) -> f64 {
    c * s.lambda_min / (s.n as f64).powf(1.0 / (s.p as f64 - 1.0))
}

pub fn rd_vector_bound(eps: f64, lambda: f64) -> f64 {
    20.0 * eps / lambda.abs()
}

pub fn cd_vector_bound(eps: f64, kappa: f64, lambda: f64) -> f64 {
    (6.2 + 4.0 * kappa) * eps / lambda.abs()
}

/// Eigenvector bound for the best rank-one approximation of a perturbed
/// orthogonally decomposable tensor: `10(ε/|λ| + (ε/λ)²)`.
pub fn rank_one_perturbation_bound(eps: f64, lambda: f64) -> Result<f64> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "lambda must be finite and nonzero, got {lambda}"
        )));
    }
    check_eps(eps)?;
    let r = eps / lambda.abs();
    Ok(10.0 * (r + r * r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Theorem {
    Rd,
    Cd,
    Ada,
    Rank1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentBound {
    pub index: usize,
    pub truth_index: usize,
    pub value_error: f64,
    pub value_bound: f64,
    pub value_ok: bool,
    pub vector_error: f64,
    pub vector_bound: f64,
    pub vector_ok: bool,
}

/// Worst-case `error / bound` ratios (bounds floored at [`BOUND_SLACK`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub value: f64,
    pub vector: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaChain {
    pub starts_at_half: bool,
    pub monotone: bool,
    pub final_theta: f64,
    /// `0.96/(2κ)`.
    pub floor: f64,
    pub above_floor: bool,
}

impl ThetaChain {
    pub fn ok(&self) -> bool {
        self.starts_at_half && self.monotone && self.above_floor
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub epsilon: f64,
    /// Preconditions of the theorem hold.
    pub admissible: bool,
    /// Admissibility rests on a chosen constant rather than a stated one.
    pub heuristic: bool,
    pub per_component: Vec<ComponentBound>,
    pub margins: Margins,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_chain: Option<ThetaChain>,
    /// The greedy alignment failed and an exhaustive one was used.
    #[serde(default)]
    pub exhaustive_alignment: bool,
}

impl BoundReport {
    pub fn bounds_hold(&self) -> bool {
        self.per_component.iter().all(|c| c.value_ok && c.vector_ok)
            && self.theta_chain.as_ref().is_none_or(ThetaChain::ok)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!(
            "epsilon must be finite and nonnegative, got {eps}"
        )));
    }
    Ok(())
}

fn components(
    report: &MatchReport,
    truth_values: &[f64],
    value_bound: impl Fn(f64) -> f64,
    vector_bound: impl Fn(f64) -> f64,
) -> Result<(Vec<ComponentBound>, Margins)> {
    if let Some(&bad) = report
        .permutation
        .iter()
        .find(|&&i| i >= truth_values.len())
    {
        return Err(Error::Dimension {
            expected: truth_values.len(),
            got: bad + 1,
        });
    }
    let mut margins = Margins {
        value: 0.0,
        vector: 0.0,
    };
    let per = (0..report.len())
        .map(|j| {
            let lambda = truth_values[report.permutation[j]];
            let vb = value_bound(lambda);
            let wb = vector_bound(lambda);
            let ve = report.value_errors[j];
            let we = report.vector_errors[j];
            margins.value = margins.value.max(ve / vb.max(BOUND_SLACK));
            margins.vector = margins.vector.max(we / wb.max(BOUND_SLACK));
            ComponentBound {
                index: j,
                truth_index: report.permutation[j],
                value_error: ve,
                value_bound: vb,
                value_ok: ve <= vb + BOUND_SLACK,
                vector_error: we,
                vector_bound: wb,
                vector_ok: we <= wb + BOUND_SLACK,
            }
        })
        .collect();
    Ok((per, margins))
}

/// Constrained-deflation bounds: `ε` on eigenvalues and `(6.2 + 4κ)ε/|λ|`
/// on eigenvectors.
pub fn check_cd_bounds(
    report: &MatchReport,
    eps: f64,
    s: &SpectralSummary,
    truth_values: &[f64],
    theta: f64,
) -> Result<BoundReport> {
    check_eps(eps)?;
    check_len(report, truth_values)?;
    let adm = admissible_params(s);
    let (per_component, margins) = components(
        report,
        truth_values,
        |_| eps,
        |l| cd_vector_bound(eps, s.kappa, l),
    )?;
    Ok(BoundReport {
        theorem: Theorem::Cd,
        epsilon: eps,
        admissible: theta > 0.0 && theta <= adm.theta_max && eps <= adm.eps_max_cd(theta),
        heuristic: false,
        per_component,
        margins,
        theta_chain: None,
        exhaustive_alignment: false,
    })
}

/// Residual-deflation bounds: `2ε` on eigenvalues and `20ε/|λ|` on
/// eigenvectors. Admissibility uses the supplied constant `c` and is
/// marked heuristic.
pub fn check_rd_bounds(
    report: &MatchReport,
    eps: f64,
    s: &SpectralSummary,
    truth_values: &[f64],
    c: f64,
) -> Result<BoundReport> {
    check_eps(eps)?;
    check_len(report, truth_values)?;
    let (per_component, margins) = components(
        report,
        truth_values,
        |_| 2.0 * eps,
        |l| rd_vector_bound(eps, l),
    )?;
    Ok(BoundReport {
        theorem: Theorem::Rd,
        epsilon: eps,
        admissible: eps <= rd_eps_threshold(s, c),
        heuristic: true,
        per_component,
        margins,
        theta_chain: None,
        exhaustive_alignment: false,
    })
}

/// Best rank-one bound, applied to the first extracted component only.
pub fn check_rank_one(report: &MatchReport, eps: f64, truth_values: &[f64]) -> Result<BoundReport> {
    check_eps(eps)?;
    if report.is_empty() {
        return Err(Error::Missing("match report has no components"));
    }
    let first = MatchReport {
        permutation: report.permutation[..1].to_vec(),
        signs: report.signs[..1].to_vec(),
        value_errors: report.value_errors[..1].to_vec(),
        vector_errors: report.vector_errors[..1].to_vec(),
    };
    let (per_component, margins) = components(
        &first,
        truth_values,
        |_| eps,
        |l| rank_one_perturbation_bound(eps, l).unwrap_or(f64::INFINITY),
    )?;
    Ok(BoundReport {
        theorem: Theorem::Rank1,
        epsilon: eps,
        admissible: true,
        heuristic: false,
        per_component,
        margins,
        theta_chain: None,
        exhaustive_alignment: false,
    })
}

fn check_len(report: &MatchReport, truth_values: &[f64]) -> Result<()> {
    if report.len() != truth_values.len() {
        return Err(Error::Dimension {
            expected: truth_values.len(),
            got: report.len(),
        });
    }
    Ok(())
}

/// Adaptive-method check: the `θ` chain starts at 1/2, never increases, and
/// ends above `0.96/(2κ)`; component bounds as for constrained deflation.
pub fn check_ada_invariants(
    d: &Decomposition,
    report: &MatchReport,
    eps: f64,
    s: &SpectralSummary,
    truth_values: &[f64],
) -> Result<BoundReport> {
    check_eps(eps)?;
    check_len(report, truth_values)?;
    let thetas = d.thetas.as_ref().ok_or(Error::Missing("thetas"))?;
    let chain = theta_chain(thetas, s.kappa)?;
    let adm = admissible_params(s);
    let (per_component, margins) = components(
        report,
        truth_values,
        |_| eps,
        |l| cd_vector_bound(eps, s.kappa, l),
    )?;
    Ok(BoundReport {
        theorem: Theorem::Ada,
        epsilon: eps,
        admissible: eps <= adm.eps_max_ada,
        heuristic: false,
        per_component,
        margins,
        theta_chain: Some(chain),
        exhaustive_alignment: false,
    })
}

pub fn theta_chain(thetas: &[f64], kappa: f64) -> Result<ThetaChain> {
    let last = *thetas.last().ok_or(Error::Missing("thetas"))?;
    let floor = 0.96 / (2.0 * kappa);
    Ok(ThetaChain {
        starts_at_half: thetas[0] == 0.5,
        monotone: thetas.windows(2).all(|w| w[1] <= w[0]),
        final_theta: last,
        floor,
        above_floor: last > floor,
    })
}

/// Options for [`verify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    /// Slab width used by constrained deflation (defaults to `1/(2κ)`).
    pub theta: Option<f64>,
    /// Constant for the residual-deflation regime.
    pub c: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            theta: None,
            c: RD_DEFAULT_C,
        }
    }
}

/// Aligns `est` with `truth` and checks the chosen theorem. When the greedy
/// alignment fails the check and `n ≤ 5`, the check is repeated with the
/// exhaustive alignment before a failure is reported.
pub fn verify(
    theorem: Theorem,
    order: usize,
    truth: &[EigenPair],
    est: &Decomposition,
    eps: f64,
    opts: CheckOptions,
) -> Result<BoundReport> {
    let values: Vec<f64> = truth.iter().map(|p| p.value).collect();
    let s = SpectralSummary::from_values(&values, order)?;
    let run = |report: &MatchReport| -> Result<BoundReport> {
        match theorem {
            Theorem::Rd => check_rd_bounds(report, eps, &s, &values, opts.c),
            Theorem::Cd => {
                let theta = opts.theta.unwrap_or(1.0 / (2.0 * s.kappa));
                check_cd_bounds(report, eps, &s, &values, theta)
            }
            Theorem::Ada => check_ada_invariants(est, report, eps, &s, &values),
            Theorem::Rank1 => check_rank_one(report, eps, &values),
        }
    };
    let greedy = match_components(truth, &est.pairs)?;
    let first = run(&greedy)?;
    if first.bounds_hold() || truth.len() > EXHAUSTIVE_RETRY_MAX_N {
        return Ok(first);
    }
    let exhaustive = exhaustive_match(truth, &est.pairs)?;
    let mut second = run(&exhaustive)?;
    second.exhaustive_alignment = true;
    Ok(second)
}
