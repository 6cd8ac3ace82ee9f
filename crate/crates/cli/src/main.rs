//! `lorentz`: drives the periodic Lorentz gas pipelines and writes plot-ready
//! CSV and JSON files.
//!
//! Exit codes: 0 on success, 1 on runtime or data errors, 2 on usage errors.
//! `LORENTZ_THREADS` caps the worker pool; results do not depend on it.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "lorentz", version, about = "Periodic Lorentz gas laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Free-path survival curve of the periodic table under the uniform phase measure.
    Fpl(FplArgs),
    /// Free-path survival curve among Poisson-distributed obstacles.
    PoissonFpl(PoissonArgs),
    /// Tail constants and power-law/exponential fits of a survival CSV.
    TailCheck(TailCheckArgs),
    /// Linear Boltzmann relaxation: decay trace, decay fit and spectral gap.
    Boltzmann(BoltzmannArgs),
    /// Non-convergence certificate from tail and decay results.
    Certify(CertifyArgs),
    /// Fourier modes of an n-oscillatory field split by alignment with nZ^D.
    TwoScale(TwoScaleArgs),
    /// Collision-by-collision dump of one billiard trajectory.
    Trace(TraceArgs),
}

#[derive(Debug, Args)]
pub struct FplArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub radius: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// `geometric:lo:hi:count`, `linear:lo:hi:count` or `list:t1,t2,...`.
    #[arg(long)]
    pub t_grid: String,
    /// Censoring horizon; defaults to the last grid time.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PoissonArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub radius: f64,
    /// Obstacle intensity; defaults to the lattice-matched `1/(1 − |B_r|)`.
    #[arg(long)]
    pub intensity: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long)]
    pub t_grid: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TailCheckArgs {
    /// Survival CSV written by `fpl` or `poisson-fpl`.
    #[arg(long)]
    pub input: PathBuf,
    /// Window `lo:hi`; defaults to `(2/r^{D-1}, 20/r^{D-1}]`.
    #[arg(long, value_parser = parse_pair)]
    pub window: Option<(f64, f64)>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct KineticArgs {
    /// Velocity nodes.
    #[arg(long, default_value_t = 32)]
    pub nodes: usize,
    /// Fourier cutoff `M` (modes with every `|ξ_i| ≤ M`).
    #[arg(long, default_value_t = 8)]
    pub modes: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// `uniform` or `file:PATH` (square table of `k(v_i, v_j)`).
    #[arg(long, default_value = "uniform")]
    pub kernel: String,
    #[arg(long, default_value_t = 20.0)]
    pub t_final: f64,
    /// Number of stored times, equally spaced on `[0, t_final]`.
    #[arg(long, default_value_t = 201)]
    pub t_count: usize,
    /// Window `lo:hi` of the exponential fit.
    #[arg(long, value_parser = parse_pair, default_value = "3:15")]
    pub fit_window: (f64, f64),
}

#[derive(Debug, Args)]
pub struct BoltzmannArgs {
    #[arg(long)]
    pub dim: usize,
    #[command(flatten)]
    pub kinetic: KineticArgs,
    /// Seed of the random initial data.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Writes `PREFIX_decay.csv`, `PREFIX_decay.json` and `PREFIX_spectral.json`.
    #[arg(long)]
    pub out_prefix: PathBuf,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Tail JSON from `tail-check`.
    #[arg(long, conflicts_with = "full", requires = "decay_json")]
    pub tail_json: Option<PathBuf>,
    /// Decay JSON from `boltzmann`.
    #[arg(long, conflicts_with = "full", requires = "tail_json")]
    pub decay_json: Option<PathBuf>,
    /// Run the survival, tail and kinetic stages first.
    #[arg(long, requires_all = ["dim", "radius", "t_grid"])]
    pub full: bool,
    /// Scale `ε` of the coupled table; `r_* = r / ε^{1/(D-1)}`.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub r_star: Option<f64>,
    /// Bump scales tried in order.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64")]
    pub m_schedule: Vec<u32>,
    /// Scan horizon; defaults to ten times the contradiction time.
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long, default_value_t = 4000)]
    pub scan_points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long)]
    pub t_grid: Option<String>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Tail window `lo:hi`; defaults to `(2/r^{D-1}, 20/r^{D-1}]`.
    #[arg(long, value_parser = parse_pair)]
    pub window: Option<(f64, f64)>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub kinetic: KineticArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FieldKind {
    /// `U(y) = cos(2π y_1)`.
    Cos,
    /// Survival indicator `1{ε τ_r(x/ε, −v) > t}`.
    Phi,
}

#[derive(Debug, Args)]
pub struct TwoScaleArgs {
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Oscillation scale `n = 1/ε`.
    #[arg(long)]
    pub n: u64,
    /// Grid points per axis; must be a multiple of `n`.
    #[arg(long)]
    pub grid: usize,
    #[arg(long, value_enum, default_value = "cos")]
    pub field: FieldKind,
    #[arg(long, default_value_t = 0.3)]
    pub t: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r_star: f64,
    /// Direction of `v` (normalised).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0.6,0.8")]
    pub velocity: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum LawKind {
    Specular,
    DiffuseUniform,
    DiffuseCosine,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub radius: f64,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub position: Vec<f64>,
    /// Direction of the initial velocity (normalised).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub velocity: Vec<f64>,
    #[arg(long)]
    pub t: f64,
    #[arg(long, value_enum, default_value = "specular")]
    pub law: LawKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_events: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got `{s}`"))?;
    let lo = a.parse::<f64>().map_err(|e| format!("`{a}`: {e}"))?;
    let hi = b.parse::<f64>().map_err(|e| format!("`{b}`: {e}"))?;
    Ok((lo, hi))
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<lorentz_core::Error> for CliError {
    fn from(e: lorentz_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("LORENTZ_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("LORENTZ_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Runtime(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Fpl(a) => commands::fpl(a),
        Command::PoissonFpl(a) => commands::poisson_fpl(a),
        Command::TailCheck(a) => commands::tail_check(a),
        Command::Boltzmann(a) => commands::boltzmann(a),
        Command::Certify(a) => commands::certify(a),
        Command::TwoScale(a) => commands::two_scale(a),
        Command::Trace(a) => commands::trace(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
