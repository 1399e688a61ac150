//! Command-line harness over `bincs-core`: instance generation, model
//! export, solving, recovery under matrix uncertainty, diagnostics,
//! embedding and benchmarking.
//!
//! Exit codes: 0 on success, 2 for invalid input, 3 for solver or size
//! limits.

pub mod bench;
mod commands;

use std::path::{Path, PathBuf};

use bincs_core::qubo_ising::IsingModel;
use bincs_core::solvers::{AnnealSchedule, Backend, DEFAULT_EXHAUSTIVE_CAP};
use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use bench::{run_bench, BenchGrid, CSV_HEADER};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] bincs_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_solver_error() => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "bincs", version, about = "Binary sparse recovery through QUBO and Ising models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a planted instance with its ground truth.
    Gen(GenArgs),
    /// Export the QUBO or Ising model of an instance.
    Build(BuildArgs),
    /// Minimize an instance or an exported model.
    Solve(SolveArgs),
    /// Alternating recovery of x and d on an uncertain instance.
    Recover(RecoverArgs),
    /// Coherence, RIP and uniqueness report.
    Diagnose(DiagnoseArgs),
    /// Map a logical Ising model onto a Chimera graph.
    Embed(EmbedArgs),
    /// Recovery-rate sweep over (m, s), written as CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Cs,
    CsUncertain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dist {
    Gaussian,
    Bernoulli,
}

impl From<Dist> for bincs_core::Distribution {
    fn from(d: Dist) -> Self {
        match d {
            Dist::Gaussian => bincs_core::Distribution::Gaussian,
            Dist::Bernoulli => bincs_core::Distribution::Bernoulli,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Form {
    Qubo,
    Ising,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendChoice {
    Exhaustive,
    Sa,
    Local,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value_t = Kind::Cs)]
    pub kind: Kind,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub s: usize,
    /// Number of perturbation matrices (uncertain kind).
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    /// Noise and regularization precision (uncertain kind).
    #[arg(long, default_value_t = 100.0)]
    pub gamma: f64,
    /// Add N(0, I/gamma) noise to y (uncertain kind).
    #[arg(long)]
    pub noise: bool,
    #[arg(long, value_enum, default_value_t = Dist::Gaussian)]
    pub dist: Dist,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub form: Form,
    /// Scale into the hardware coefficient ranges (Ising only).
    #[arg(long)]
    pub normalize: bool,
    /// Quantize to this many bits (Ising only).
    #[arg(long)]
    pub bits: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Backend selection shared by `solve`, `recover` and `bench`.
#[derive(Debug, Clone, Args)]
pub struct BackendArgs {
    #[arg(long, value_enum, default_value_t = BackendChoice::Exhaustive)]
    pub backend: BackendChoice,
    /// Largest n the exhaustive backend accepts.
    #[arg(long, default_value_t = DEFAULT_EXHAUSTIVE_CAP)]
    pub cap: usize,
    #[arg(long)]
    pub sweeps: Option<usize>,
    #[arg(long)]
    pub reads: Option<usize>,
    #[arg(long)]
    pub beta0: Option<f64>,
    #[arg(long)]
    pub beta1: Option<f64>,
    /// Random starts for the local backend.
    #[arg(long, default_value_t = 50)]
    pub starts: usize,
}

impl BackendArgs {
    pub fn exhaustive() -> Self {
        Self {
            backend: BackendChoice::Exhaustive,
            cap: DEFAULT_EXHAUSTIVE_CAP,
            sweeps: None,
            reads: None,
            beta0: None,
            beta1: None,
            starts: 50,
        }
    }

    /// Annealing overrides are applied on top of the default schedule of
    /// `reference`.
    pub fn resolve(&self, reference: &IsingModel<f64>) -> CliResult<Backend<f64>> {
        Ok(match self.backend {
            BackendChoice::Exhaustive => Backend::Exhaustive { cap_n: self.cap },
            BackendChoice::Local => {
                if self.starts == 0 {
                    return Err(usage("--starts must be positive"));
                }
                Backend::Local { starts: self.starts }
            }
            BackendChoice::Sa => {
                if self.sweeps.is_none() && self.reads.is_none() && self.beta0.is_none() && self.beta1.is_none() {
                    Backend::Sa(None)
                } else {
                    let d = AnnealSchedule::default_for(reference);
                    let s = AnnealSchedule::new(
                        self.sweeps.unwrap_or(d.sweeps),
                        self.beta0.unwrap_or(d.beta_initial),
                        self.beta1.unwrap_or(d.beta_final),
                        self.reads.unwrap_or(d.reads),
                    )?;
                    Backend::Sa(Some(s))
                }
            }
        })
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Instance JSON or exported model text.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub backend: BackendArgs,
    /// Override the instance penalty.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[command(flatten)]
    pub backend: BackendArgs,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    #[arg(long, default_value_t = bincs_core::uncertainty::DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub coherence: bool,
    /// RIP order to compute.
    #[arg(long)]
    pub rip: Option<usize>,
    #[arg(long)]
    pub uniqueness: bool,
    /// Most column subsets the RIP enumeration may visit.
    #[arg(long, default_value_t = bincs_core::diagnostics::DEFAULT_RIP_CAP)]
    pub rip_cap: u128,
    /// Largest n the uniqueness check accepts.
    #[arg(long, default_value_t = bincs_core::diagnostics::DEFAULT_UNIQUENESS_CAP)]
    pub uniqueness_cap: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Exported Ising (or QUBO) model.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, num_args = 2, value_names = ["R", "C"], default_values_t = [1, 1])]
    pub cells: Vec<usize>,
    #[arg(long, default_value_t = 4)]
    pub t: usize,
    /// Embedding JSON `{ "chains": [[...], ...] }`; defaults to the
    /// single-cell clique embedding.
    #[arg(long)]
    pub embedding: Option<PathBuf>,
    /// Positive number or `auto`.
    #[arg(long, default_value = "auto")]
    pub chain_strength: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    pub m_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub s_list: Vec<usize>,
    #[arg(long)]
    pub trials: usize,
    #[command(flatten)]
    pub backend: BackendArgs,
    #[arg(long, value_enum, default_value_t = Dist::Gaussian)]
    pub dist: Dist,
    /// Fixed penalty; by default each instance uses its own default.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = bincs_core::diagnostics::DEFAULT_UNIQUENESS_CAP)]
    pub uniqueness_cap: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen(a) => commands::gen(&a),
        Command::Build(a) => commands::build(&a),
        Command::Solve(a) => commands::solve(&a),
        Command::Recover(a) => commands::recover(&a),
        Command::Diagnose(a) => commands::diagnose(&a),
        Command::Embed(a) => commands::embed(&a),
        Command::Bench(a) => {
            let grid = BenchGrid {
                n: a.n,
                m_values: a.m_list,
                s_values: a.s_list,
                trials: a.trials,
                backend: a.backend,
                dist: a.dist.into(),
                lambda: a.lambda,
                uniqueness_cap: a.uniqueness_cap,
                seed: a.seed,
            };
            emit(a.out.as_deref(), &run_bench(&grid)?)
        }
    }
}

pub(crate) fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Writes to `out`, or to stdout when no path is given.
pub(crate) fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
