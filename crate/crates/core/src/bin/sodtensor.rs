use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use sodtensor::bounds::{self, SpectralSummary};
use sodtensor::experiments::{
    gen_perturbation_with, gen_sod, run_experiment, Basis, ExperimentId, ExperimentOptions,
    InstanceSpec,
};
use sodtensor::{
    match_components, Decomposition, MatchReport, Method, SolverConfig, SymmetricTensor,
};

#[derive(Parser)]
#[command(
    name = "sodtensor",
    version,
    about = "Greedy decomposition of nearly SOD tensors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate T = Σ λ_i v_i^{⊗p} and write it as tensor JSON.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        /// Comma-separated values, or a file containing them.
        #[arg(long)]
        eigenvalues: String,
        #[arg(long, value_enum, default_value = "identity")]
        basis: BasisArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the ground-truth pairs (decomposition JSON).
        #[arg(long)]
        truth_out: Option<PathBuf>,
    },
    /// Generate symmetrized Gaussian noise E and print ε = ‖E‖.
    Perturb {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        out: PathBuf,
        /// Write T + E for this tensor instead of E.
        #[arg(long)]
        add_to: Option<PathBuf>,
        /// Restarts for the ε estimate.
        #[arg(long, default_value_t = SolverConfig::default().restarts)]
        restarts: usize,
    },
    /// Run a greedy decomposition.
    Decompose {
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Slab width for `cd` (0 means exact orthogonality).
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value_t = SolverConfig::default().restarts)]
        restarts: usize,
        #[arg(long, default_value_t = SolverConfig::default().tol)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Align an estimate with a ground truth.
    Match {
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        est: PathBuf,
        /// Tensor order, used later by `check`.
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a perturbation bound against a `match` report. Exits with
    /// status 1 when a bound is violated.
    Check {
        #[arg(long, value_enum)]
        theorem: TheoremArg,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        report: PathBuf,
        /// Slab width for `cd` (defaults to 1/(2κ)).
        #[arg(long)]
        theta: Option<f64>,
        /// Constant of the residual-deflation noise regime.
        #[arg(long, default_value_t = bounds::RD_DEFAULT_C)]
        c: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded batch experiment.
    #[command(long_about = EXPERIMENT_HELP)]
    Experiment {
        /// 1, 2, 3 or sweep.
        id: String,
        #[arg(long)]
        instances: Option<usize>,
        /// 200 instances for experiments 1 and 2.
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = SolverConfig::default().restarts)]
        restarts: usize,
        #[arg(long, default_value_t = 1.0)]
        noise_scale: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

const EXPERIMENT_HELP: &str = "\
Run a seeded batch experiment and write a JSON report.

Experiments:
  1      noisy 5x5x5 diagonal-300 tensors, constrained deflation with theta = 1/2
  2      the same instances, theta = 1/2 against exact orthogonality (theta = 0)
  3      noiseless 1000 e1 + 100 (e2 + ... + e5), theta = 1/2 and theta = 1/20
  sweep  residual deflation across dimensions and noise scales

CSV columns (--csv):
  1      bin_lo,bin_hi,eigenvalue_count,eigenvector_count
         50 bins over [0, 1.05); the final row (bin_hi = inf) counts overflow
  2      index,seed,epsilon,metric_half,metric_zero,difference,observed_half,observed_zero
         metrics are Frobenius residuals against the noiseless truth, observed_*
         against the perturbed input
  3      theta,k,value,v1,...,vn
  sweep  n,noise_scale,index,seed,epsilon,admissible,value_ratio,vector_ratio,bounds_hold";

#[derive(Clone, Copy, ValueEnum)]
enum BasisArg {
    Identity,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Rd,
    Cd,
    Ada,
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoremArg {
    Rd,
    Cd,
    Ada,
    Rank1,
}

/// Output of `match`, input of `check`.
#[derive(Serialize, Deserialize)]
struct MatchFile {
    order: usize,
    truth_values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    thetas: Option<Vec<f64>>,
    report: MatchReport,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, body: &str) -> anyhow::Result<()> {
    fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

fn parse_values(arg: &str) -> anyhow::Result<Vec<f64>> {
    let text = if Path::new(arg).is_file() {
        read(Path::new(arg))?
    } else {
        arg.to_string()
    };
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .with_context(|| format!("bad eigenvalue {s:?}"))
        })
        .collect()
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Gen {
            n,
            p,
            eigenvalues,
            basis,
            seed,
            out,
            truth_out,
        } => {
            let spec = InstanceSpec {
                n,
                p,
                eigenvalues: parse_values(&eigenvalues)?,
                basis: match basis {
                    BasisArg::Identity => Basis::Identity,
                    BasisArg::Random => Basis::RandomOrthonormal { seed },
                },
                noise_scale: 0.0,
                seed,
            };
            let (t, truth) = gen_sod(&spec)?;
            write(&out, &t.to_json()?)?;
            if let Some(path) = truth_out {
                write(&path, &Decomposition::from_pairs(truth).to_json()?)?;
            }
        }
        Command::Perturb {
            n,
            p,
            seed,
            scale,
            out,
            add_to,
            restarts,
        } => {
            let cfg = SolverConfig {
                restarts,
                ..SolverConfig::default()
            };
            let e = gen_perturbation_with(n, p, seed, scale, &cfg)?;
            let t = match add_to {
                Some(path) => SymmetricTensor::from_json(&read(&path)?)?.add(&e.tensor)?,
                None => e.tensor.clone(),
            };
            write(&out, &t.to_json()?)?;
            println!("{}", e.epsilon);
        }
        Command::Decompose {
            tensor,
            method,
            theta,
            restarts,
            tol,
            seed,
            out,
        } => {
            let t = SymmetricTensor::from_json(&read(&tensor)?)?;
            let method = match (method, theta) {
                (MethodArg::Rd, _) => Method::Rd,
                (MethodArg::Ada, _) => Method::Ada,
                (MethodArg::Cd, Some(theta)) => Method::Cd { theta },
                (MethodArg::Cd, None) => bail!("--theta is required for --method cd"),
            };
            let cfg = SolverConfig {
                restarts,
                tol,
                seed,
                ..SolverConfig::default()
            };
            let d = method.run(&t, &cfg)?;
            write(&out, &d.to_json()?)?;
        }
        Command::Match {
            truth,
            est,
            order,
            out,
        } => {
            let truth = Decomposition::from_json(&read(&truth)?)?;
            let est = Decomposition::from_json(&read(&est)?)?;
            let report = match_components(&truth.pairs, &est.pairs)?;
            let file = MatchFile {
                order,
                truth_values: truth.values(),
                thetas: est.thetas,
                report,
            };
            write(&out, &serde_json::to_string_pretty(&file)?)?;
        }
        Command::Check {
            theorem,
            eps,
            report,
            theta,
            c,
            out,
        } => {
            let m: MatchFile = serde_json::from_str(&read(&report)?)?;
            let s = SpectralSummary::from_values(&m.truth_values, m.order)?;
            let r = match theorem {
                TheoremArg::Rd => bounds::check_rd_bounds(&m.report, eps, &s, &m.truth_values, c)?,
                TheoremArg::Cd => {
                    let theta = theta.unwrap_or(1.0 / (2.0 * s.kappa));
                    bounds::check_cd_bounds(&m.report, eps, &s, &m.truth_values, theta)?
                }
                TheoremArg::Ada => {
                    let mut d = Decomposition::from_pairs(Vec::new());
                    d.thetas = m.thetas.clone();
                    bounds::check_ada_invariants(&d, &m.report, eps, &s, &m.truth_values)?
                }
                TheoremArg::Rank1 => bounds::check_rank_one(&m.report, eps, &m.truth_values)?,
            };
            let body = r.to_json()?;
            match out {
                Some(path) => write(&path, &body)?,
                None => println!("{body}"),
            }
            if !r.bounds_hold() {
                eprintln!("bound violated (admissible: {})", r.admissible);
                return Ok(ExitCode::from(1));
            }
        }
        Command::Experiment {
            id,
            instances,
            quick,
            seed,
            restarts,
            noise_scale,
            out,
            csv,
        } => {
            let id: ExperimentId = id.parse()?;
            let opts = ExperimentOptions {
                instances,
                quick,
                seed,
                solver: SolverConfig {
                    restarts,
                    ..SolverConfig::default()
                },
                noise_scale,
                ..ExperimentOptions::default()
            };
            let report = run_experiment(id, &opts)?;
            write(&out, &report.to_json()?)?;
            if let Some(path) = csv {
                let f = fs::File::create(&path)
                    .with_context(|| format!("writing {}", path.display()))?;
                report.write_csv(std::io::BufWriter::new(f))?;
            }
            let s = &report.summary;
            println!("{} instances, {} failed", report.instances, s.failed);
            if let Some(e1) = &s.e1 {
                println!(
                    "max eigenvalue stat {:.4}, max eigenvector stat {:.4}, within bound {}",
                    e1.max_eigenvalue_stat, e1.max_eigenvector_stat, e1.within_bound
                );
            }
            if let Some(e2) = &s.e2 {
                println!(
                    "theta = 1/2 better on {} instances (against the input: {})",
                    e2.half_better, e2.observed_half_better
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
