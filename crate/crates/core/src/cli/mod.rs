//! Command-line front end.
//!
//! Subcommands read a JSON [`RunConfig`] and write a JSON report (CSV for
//! `sweep`) to `--out` or stdout. Exit codes: 0 success, 1 configuration
//! error, 2 model assumption violated, 3 numerical non-convergence,
//! 4 verification failure.

mod config;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use log::{info, warn};

pub use config::{parse_grid, RunConfig};
pub use report::{
    format_float, sweep_csv, to_json, AnalyzeReport, ModelEcho, Moments, SimulateReport, SweepRow, VerifyReport,
};

use crate::analytic::{clustering_coefficient, extinction_probability, root_degree_pmf, survival_criterion};
use crate::dist::{child_count_pmf, ModelParams};
use crate::matrix::{cascade_verdict, mean_matrix, spectral_radius};
use crate::sim::{estimate, SimConfig};
use crate::verify::verify_model;
use crate::Error;

const VERTEX_WARNING: f64 = 1e7;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{failed} verification check(s) failed")]
    VerificationFailed { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Model(Error::AssumptionViolated(_)) => 2,
            CliError::Model(Error::NoConvergence { .. }) => 3,
            CliError::VerificationFailed { .. } => 4,
            CliError::Model(_) | CliError::Io { .. } => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "clique-cascade", version, about = "Threshold cascades on random graphs with overlapping cliques")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form analysis: moments, extinction, clustering, mean matrix, verdict.
    Analyze {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate of survival on depth-truncated graphs.
    ///
    /// Replicate r of seed S uses root key k = mix(splitmix64(S), r) with
    /// mix(a, b) = splitmix64(a ^ splitmix64(b)). Member m of child clique j
    /// of the vertex keyed k gets key mix(mix(k, j), m). Each vertex draws its
    /// cliques from ChaCha8 seeded by its key via `seed_from_u64`; bulk counts
    /// of inactive subtrees use ChaCha8 seeded by mix(k, 0x646f726d616e74).
    /// Flags override the config's `sim` block.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        replicates: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; the report does not depend on this.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral radius and verdict over a grid of thresholds, as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated thresholds; falls back to the config's `grid`.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks the closed forms against exhaustive enumeration.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Reports go to `--out` or `stdout`; errors to stderr.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Analyze { config, out } => {
            let report = analyze(&RunConfig::load(&config)?)?;
            emit(&json(&report)?, out.as_deref(), stdout)
        }
        Command::Simulate {
            config,
            depth,
            replicates,
            seed,
            threads,
            out,
        } => {
            let cfg = RunConfig::load(&config)?;
            let base = cfg.sim;
            let pick = |flag: Option<u64>, field: Option<u64>, name: &str| {
                flag.or(field)
                    .ok_or_else(|| Error::ConfigInvalid(format!("missing {name}: pass --{name} or a sim block")))
            };
            let sim = SimConfig {
                depth: pick(depth.map(|d| d as u64), base.map(|s| s.depth as u64), "depth")? as usize,
                replicates: pick(replicates, base.map(|s| s.replicates), "replicates")?,
                seed: pick(seed, base.map(|s| s.seed), "seed")?,
            };
            let report = match threads {
                Some(n) => rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::ConfigInvalid(e.to_string()))?
                    .install(|| simulate(&cfg, &sim))?,
                None => simulate(&cfg, &sim)?,
            };
            emit(&json(&report)?, out.as_deref(), stdout)
        }
        Command::Sweep { config, grid, out } => {
            let cfg = RunConfig::load(&config)?;
            let grid = match grid {
                Some(text) => parse_grid(&text)?,
                None => cfg.grid.clone().unwrap_or_default(),
            };
            let rows = sweep(&cfg.params()?, &grid)?;
            emit(&sweep_csv(&rows), out.as_deref(), stdout)
        }
        Command::Verify { config, out } => {
            let report = verify(&RunConfig::load(&config)?)?;
            emit(&json(&report)?, out.as_deref(), stdout)?;
            match report.checks.iter().filter(|c| !c.passed).count() {
                0 => Ok(()),
                failed => Err(CliError::VerificationFailed { failed }),
            }
        }
    }
}

fn json<T: serde::Serialize>(report: &T) -> Result<String, CliError> {
    to_json(report).map_err(|e| Error::ConfigInvalid(e.to_string()).into())
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let io_error = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CliError::Io { path, source }
    };
    match out {
        Some(path) => std::fs::write(path, text).map_err(io_error(path)),
        None => stdout.write_all(text.as_bytes()).map_err(io_error(Path::new("<stdout>"))),
    }
}

pub fn analyze(config: &RunConfig) -> Result<AnalyzeReport, CliError> {
    let params = config.params()?;
    let verdict = cascade_verdict(&params)?;
    let matrix = mean_matrix(&params)?;
    let rho = match verdict.rho {
        Some(rho) => rho,
        None => spectral_radius(&matrix)?,
    };
    let children = child_count_pmf(&params)?;
    Ok(AnalyzeReport {
        model: ModelEcho::from(config),
        moments: Moments {
            lambda: params.lambda(),
            mu: params.mu(),
            d_factorial_2: params.p().factorial_moment(2),
            w_factorial_2: params.q().factorial_moment(2),
            w_factorial_3: params.q().factorial_moment(3),
            child_count_mean: children.mean(),
        },
        survival_criterion: survival_criterion(&params),
        extinction: extinction_probability(&params)?,
        root_degree_pmf: root_degree_pmf(&params)?.to_pairs(),
        clustering: clustering_coefficient(&params),
        child_count_pmf: children.to_pairs(),
        mean_matrix: matrix,
        rho,
        verdict,
    })
}

/// Expected number of vertices of a graph truncated at `depth`.
fn expected_vertices(params: &ModelParams, depth: usize) -> f64 {
    let per_clique = params.q().factorial_moment(2) / params.mu();
    let root = params.lambda() * per_clique;
    let growth = params.p().factorial_moment(2) / params.lambda() * per_clique;
    1.0 + root * (0..depth).map(|k| growth.powi(k as i32)).sum::<f64>()
}

pub fn simulate(config: &RunConfig, sim: &SimConfig) -> Result<SimulateReport, CliError> {
    sim.validate()?;
    let params = config.params()?;
    let expected = expected_vertices(&params, sim.depth);
    if expected > VERTEX_WARNING {
        warn!("expected {expected:.3e} vertices per replicate at depth {}", sim.depth);
    }
    info!("simulating {} replicates to depth {}", sim.replicates, sim.depth);
    Ok(SimulateReport {
        model: ModelEcho::from(config),
        config: *sim,
        result: estimate(&params, sim)?,
    })
}

pub fn sweep(params: &ModelParams, grid: &[crate::dist::ThresholdQ]) -> Result<Vec<SweepRow>, CliError> {
    if grid.is_empty() {
        return Err(Error::ConfigInvalid("empty sweep grid".into()).into());
    }
    grid.iter()
        .map(|&theta| {
            let model = params.with_theta(theta);
            let verdict = cascade_verdict(&model)?;
            let rho = match verdict.rho {
                Some(rho) => rho,
                None => spectral_radius(&mean_matrix(&model)?)?,
            };
            Ok(SweepRow { theta, rho, verdict })
        })
        .collect()
}

pub fn verify(config: &RunConfig) -> Result<VerifyReport, CliError> {
    let checks = verify_model(&config.params()?)?;
    Ok(VerifyReport {
        model: ModelEcho::from(config),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
