use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::runner::{ExperimentId, SweepOptions};
use crate::decomposition::Decomposition;
use crate::error::Result;
use crate::solver::SolverConfig;

pub const HISTOGRAM_BINS: usize = 50;
pub const HISTOGRAM_MAX: f64 = 1.05;

/// Fixed-width bins over `[0, max)` plus an overflow count for values `≥ max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub min: f64,
    pub max: f64,
    pub counts: Vec<usize>,
    pub overflow: usize,
}

impl Histogram {
    pub fn new(bins: usize, max: f64) -> Self {
        Self {
            min: 0.0,
            max,
            counts: vec![0; bins],
            overflow: 0,
        }
    }

    pub fn add(&mut self, x: f64) {
        let bins = self.counts.len();
        let w = (self.max - self.min) / bins as f64;
        if x.is_nan() || x >= self.max {
            self.overflow += 1;
            return;
        }
        let b = (((x - self.min) / w).floor().max(0.0) as usize).min(bins - 1);
        self.counts[b] += 1;
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum::<usize>() + self.overflow
    }

    pub fn edges(&self, bin: usize) -> (f64, f64) {
        let w = (self.max - self.min) / self.counts.len() as f64;
        (self.min + w * bin as f64, self.min + w * (bin + 1) as f64)
    }
}

/// Noisy diagonal instance decomposed with `θ = 1/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct E1Record {
    /// `max_j min_± |λ̂_j ± λ| / ε`.
    pub eigenvalue_stat: f64,
    /// `(λ / (10.2 ε)) max_j min_{i,±} ‖v̂_j ± e_i‖`.
    pub eigenvector_stat: f64,
    /// `ε ≤ θ² λ_min / 12.5`.
    pub eps_admissible: bool,
    pub within_bound: bool,
    /// Outcome of the full component-wise bound check after alignment.
    pub bounds_hold: bool,
}

/// Residual metric against the noiseless truth for `θ = 1/2` and `θ = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct E2Record {
    pub metric_half: f64,
    pub metric_zero: f64,
    /// `metric_zero − metric_half`.
    pub difference: f64,
    pub half_better: bool,
    /// The same metric measured against the observed tensor `T + E`.
    pub observed_half: f64,
    pub observed_zero: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct E3Record {
    pub half: Decomposition,
    pub twentieth: Decomposition,
}

/// Residual-deflation bound ratios at one `(n, scale)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: usize,
    pub noise_scale: f64,
    pub rd_threshold: f64,
    pub admissible: bool,
    /// Largest eigenvalue error over `2ε`.
    pub value_ratio: f64,
    /// Largest eigenvector error over `20ε/λ`.
    pub vector_ratio: f64,
    pub bounds_hold: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub index: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e1: Option<E1Record>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e2: Option<E2Record>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e3: Option<E3Record>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepRecord>,
}

impl InstanceRecord {
    pub(super) fn new(index: usize, seed: u64) -> Self {
        Self {
            index,
            seed,
            epsilon: None,
            error: None,
            e1: None,
            e2: None,
            e3: None,
            sweep: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct E1Summary {
    pub max_eigenvalue_stat: f64,
    pub mean_eigenvalue_stat: f64,
    pub max_eigenvector_stat: f64,
    pub mean_eigenvector_stat: f64,
    pub within_bound: usize,
    pub admissible: usize,
    /// Instances that are admissible but exceed a normalized bound.
    pub admissible_violations: Vec<usize>,
    pub bounds_hold: usize,
    pub eigenvalue_histogram: Histogram,
    pub eigenvector_histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct E2Summary {
    pub half_better: usize,
    pub not_better: Vec<usize>,
    /// Instances where `θ = 1/2` wins against the observed tensor.
    pub observed_half_better: usize,
    pub mean_difference: f64,
    pub min_difference: f64,
    pub max_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub n: usize,
    pub noise_scale: f64,
    pub count: usize,
    pub admissible: usize,
    pub max_value_ratio: f64,
    pub max_vector_ratio: f64,
    pub bounds_hold: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub completed: usize,
    pub failed: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e1: Option<E1Summary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e2: Option<E2Summary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepCell>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment_id: ExperimentId,
    pub master_seed: u64,
    pub instances: usize,
    pub noise_scale: f64,
    /// Solver settings for the decompositions; `ε` is estimated with the
    /// same number of restarts.
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_options: Option<SweepOptions>,
    pub records: Vec<InstanceRecord>,
    pub summary: Summary,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn max(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(0.0, f64::max)
}

impl Summary {
    pub(super) fn build(records: &[InstanceRecord]) -> Self {
        let failed = records.iter().filter(|r| r.failed()).count();
        let e1: Vec<(usize, &E1Record)> = records
            .iter()
            .filter_map(|r| r.e1.as_ref().map(|e| (r.index, e)))
            .collect();
        let e2: Vec<(usize, &E2Record)> = records
            .iter()
            .filter_map(|r| r.e2.as_ref().map(|e| (r.index, e)))
            .collect();
        let sweep: Vec<&SweepRecord> = records.iter().filter_map(|r| r.sweep.as_ref()).collect();
        Self {
            completed: records.len() - failed,
            failed,
            e1: (!e1.is_empty()).then(|| summarize_e1(&e1)),
            e2: (!e2.is_empty()).then(|| summarize_e2(&e2)),
            sweep: (!sweep.is_empty()).then(|| summarize_sweep(&sweep)),
        }
    }
}

fn summarize_e1(recs: &[(usize, &E1Record)]) -> E1Summary {
    let vals: Vec<f64> = recs.iter().map(|(_, r)| r.eigenvalue_stat).collect();
    let vecs: Vec<f64> = recs.iter().map(|(_, r)| r.eigenvector_stat).collect();
    let mut hv = Histogram::new(HISTOGRAM_BINS, HISTOGRAM_MAX);
    let mut hw = Histogram::new(HISTOGRAM_BINS, HISTOGRAM_MAX);
    vals.iter().for_each(|&x| hv.add(x));
    vecs.iter().for_each(|&x| hw.add(x));
    E1Summary {
        max_eigenvalue_stat: max(&vals),
        mean_eigenvalue_stat: mean(&vals),
        max_eigenvector_stat: max(&vecs),
        mean_eigenvector_stat: mean(&vecs),
        within_bound: recs.iter().filter(|(_, r)| r.within_bound).count(),
        admissible: recs.iter().filter(|(_, r)| r.eps_admissible).count(),
        admissible_violations: recs
            .iter()
            .filter(|(_, r)| r.eps_admissible && !r.within_bound)
            .map(|(i, _)| *i)
            .collect(),
        bounds_hold: recs.iter().filter(|(_, r)| r.bounds_hold).count(),
        eigenvalue_histogram: hv,
        eigenvector_histogram: hw,
    }
}

fn summarize_e2(recs: &[(usize, &E2Record)]) -> E2Summary {
    let diffs: Vec<f64> = recs.iter().map(|(_, r)| r.difference).collect();
    E2Summary {
        half_better: recs.iter().filter(|(_, r)| r.half_better).count(),
        not_better: recs
            .iter()
            .filter(|(_, r)| !r.half_better)
            .map(|(i, _)| *i)
            .collect(),
        observed_half_better: recs
            .iter()
            .filter(|(_, r)| r.observed_half < r.observed_zero)
            .count(),
        mean_difference: mean(&diffs),
        min_difference: diffs.iter().copied().fold(f64::INFINITY, f64::min),
        max_difference: diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

fn summarize_sweep(recs: &[&SweepRecord]) -> Vec<SweepCell> {
    let mut cells: Vec<SweepCell> = Vec::new();
    for r in recs {
        let cell = match cells
            .iter_mut()
            .find(|c| c.n == r.n && c.noise_scale == r.noise_scale)
        {
            Some(c) => c,
            None => {
                cells.push(SweepCell {
                    n: r.n,
                    noise_scale: r.noise_scale,
                    count: 0,
                    admissible: 0,
                    max_value_ratio: 0.0,
                    max_vector_ratio: 0.0,
                    bounds_hold: 0,
                });
                cells.last_mut().unwrap()
            }
        };
        cell.count += 1;
        cell.admissible += r.admissible as usize;
        cell.bounds_hold += r.bounds_hold as usize;
        cell.max_value_ratio = cell.max_value_ratio.max(r.value_ratio);
        cell.max_vector_ratio = cell.max_vector_ratio.max(r.vector_ratio);
    }
    cells
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Writes the experiment's table:
    ///
    /// - E1: `bin_lo,bin_hi,eigenvalue_count,eigenvector_count`; the last
    ///   row (`bin_hi = inf`) is the overflow bin;
    /// - E2: `index,seed,epsilon,metric_half,metric_zero,difference,observed_half,observed_zero`;
    /// - E3: `theta,k,value,v1,…,vn`;
    /// - sweep: `n,noise_scale,index,seed,epsilon,admissible,value_ratio,vector_ratio,bounds_hold`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        match self.experiment_id {
            ExperimentId::E1 => {
                writeln!(w, "bin_lo,bin_hi,eigenvalue_count,eigenvector_count")?;
                if let Some(s) = &self.summary.e1 {
                    let (hv, hw) = (&s.eigenvalue_histogram, &s.eigenvector_histogram);
                    for b in 0..hv.counts.len() {
                        let (lo, hi) = hv.edges(b);
                        writeln!(w, "{lo:?},{hi:?},{},{}", hv.counts[b], hw.counts[b])?;
                    }
                    writeln!(w, "{:?},inf,{},{}", hv.max, hv.overflow, hw.overflow)?;
                }
            }
            ExperimentId::E2 => {
                writeln!(w, "index,seed,epsilon,metric_half,metric_zero,difference,observed_half,observed_zero")?;
                for r in &self.records {
                    if let (Some(e), Some(eps)) = (&r.e2, r.epsilon) {
                        writeln!(
                            w,
                            "{},{},{:?},{:?},{:?},{:?},{:?},{:?}",
                            r.index,
                            r.seed,
                            eps,
                            e.metric_half,
                            e.metric_zero,
                            e.difference,
                            e.observed_half,
                            e.observed_zero
                        )?;
                    }
                }
            }
            ExperimentId::E3 => {
                let n = self
                    .records
                    .iter()
                    .find_map(|r| r.e3.as_ref().and_then(|e| e.half.pairs.first()))
                    .map_or(0, |p| p.vector.dim());
                let cols: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
                writeln!(w, "theta,k,value,{}", cols.join(","))?;
                if let Some(e) = self.records.iter().find_map(|r| r.e3.as_ref()) {
                    for (theta, d) in [(0.5, &e.half), (0.05, &e.twentieth)] {
                        for (k, p) in d.pairs.iter().enumerate() {
                            let v: Vec<String> =
                                p.vector.iter().map(|x| format!("{x:?}")).collect();
                            writeln!(w, "{theta:?},{},{:?},{}", k + 1, p.value, v.join(","))?;
                        }
                    }
                }
            }
            ExperimentId::Sweep => {
                writeln!(
                    w,
                    "n,noise_scale,index,seed,epsilon,admissible,value_ratio,vector_ratio,bounds_hold"
                )?;
                for r in &self.records {
                    if let (Some(s), Some(eps)) = (&r.sweep, r.epsilon) {
                        writeln!(
                            w,
                            "{},{:?},{},{},{:?},{},{:?},{:?},{}",
                            s.n,
                            s.noise_scale,
                            r.index,
                            r.seed,
                            eps,
                            s.admissible,
                            s.value_ratio,
                            s.vector_ratio,
                            s.bounds_hold
                        )?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_binning() {
        let mut h = Histogram::new(HISTOGRAM_BINS, HISTOGRAM_MAX);
        h.add(0.0);
        h.add(0.0209);
        h.add(0.021);
        h.add(1.0499);
        h.add(1.05);
        h.add(f64::NAN);
        assert_eq!(h.counts[0], 2);
        assert_eq!(h.counts[1], 1);
        assert_eq!(h.counts[49], 1);
        assert_eq!(h.overflow, 2);
        assert_eq!(h.total(), 6);
        let (lo, hi) = h.edges(49);
        assert!((lo - 1.029).abs() < 1e-12 && (hi - 1.05).abs() < 1e-12);
    }
}
