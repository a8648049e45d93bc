//! `poqlab`: command-line front end for Hamiltonian games, exact values,
//! sampled play, knowledge extraction and parameter tables.

mod commands;
mod descriptor;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] poqlab::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("out of regime: {0}")]
    OutOfRegime(String),
}

const EXIT_INVALID: u8 = 2;
const EXIT_OUT_OF_REGIME: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "poqlab", version, about = "Hamiltonian games, exact values and knowledge extraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format; with --out it applies to the file.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the machine-readable report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Treat out-of-regime warnings as errors (exit code 3).
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ground energy and ground state of a Hamiltonian.
    Ground {
        #[arg(long)]
        ham: PathBuf,
        /// Write the ground state as JSON.
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Exact winning probability of a strategy.
    Value(ValueArgs),
    /// Sampled play with a Hoeffding interval and transcripts.
    Play(PlayArgs),
    /// Runs the knowledge extractor and checks the energy bound.
    Extract(ExtractArgs),
    /// Deviation of Bob's observables from the swapped Paulis.
    Rigidity(RigidityArgs),
    /// Parameter table {η*, p*, κ, D, η̂}.
    Params(ParamsArgs),
    /// Extraction and rigidity over a depolarization grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GameKind {
    /// Magic Square.
    Ms,
    /// Low-weight Pauli braiding test.
    Lwpbt,
}

#[derive(Debug, Clone, Args)]
pub struct GameArgs {
    /// Hamiltonian file; the game is G(H, p).
    #[arg(long, conflicts_with = "game")]
    pub ham: Option<PathBuf>,
    #[arg(long, value_enum, requires_if("lwpbt", "n"))]
    pub game: Option<GameKind>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Strategy: preset name, inline JSON descriptor or descriptor file.
    #[arg(long, default_value = "honest")]
    pub strategy: String,
    #[command(flatten)]
    pub p: PArgs,
    /// Target energy α (default max(0, λ0)).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Rigidity constant.
    #[arg(long = "C", default_value_t = poqlab::params::DEFAULT_C)]
    pub c: f64,
}

#[derive(Debug, Clone, Args)]
pub struct PArgs {
    /// Energy-test probability.
    #[arg(long, conflicts_with = "p_star")]
    pub p: Option<f64>,
    /// Use p = p*(n, γ, α, C).
    #[arg(long)]
    pub p_star: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ValueArgs {
    #[command(flatten)]
    pub game: GameArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PlayArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long, default_value_t = 10_000)]
    pub rounds: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
    /// Write one JSON transcript per round.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub ham: PathBuf,
    #[arg(long, default_value = "honest")]
    pub strategy: String,
    #[command(flatten)]
    pub p: PArgs,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long = "C", default_value_t = poqlab::params::DEFAULT_C)]
    pub c: f64,
    /// Estimate ε by sampled play instead of exactly.
    #[arg(long, requires = "seed")]
    pub sampled: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 10_000)]
    pub rounds: u64,
    /// Dump ζ as a dense matrix (JSON).
    #[arg(long)]
    pub zeta: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RigidityArgs {
    #[arg(long, conflicts_with = "n")]
    pub ham: Option<PathBuf>,
    #[arg(long, required_unless_present = "ham")]
    pub n: Option<usize>,
    #[arg(long, default_value = "honest")]
    pub strategy: String,
    /// Depolarization applied on top of the strategy.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ParamsArgs {
    /// Take n, γ and the default α from a Hamiltonian.
    #[arg(long, conflicts_with_all = ["n", "gamma"])]
    pub ham: Option<PathBuf>,
    #[arg(long, required_unless_present = "ham")]
    pub n: Option<usize>,
    #[arg(long, required_unless_present = "ham")]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long = "C", default_value_t = poqlab::params::DEFAULT_C)]
    pub c: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub ham: PathBuf,
    #[arg(long, default_value = "honest")]
    pub strategy: String,
    /// Depolarization grid, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0,0.02,0.05,0.1")]
    pub delta: Vec<f64>,
    #[command(flatten)]
    pub p: PArgs,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long = "C", default_value_t = poqlab::params::DEFAULT_C)]
    pub c: f64,
}

/// Shared flags every command sees.
pub struct Ctx {
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub strict: bool,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let ctx = Ctx { format: cli.format, out: cli.out, strict: cli.strict };
    match cli.command {
        Command::Ground { ham, state } => commands::ground(&ctx, &ham, state.as_deref()),
        Command::Value(a) => commands::value(&ctx, &a),
        Command::Play(a) => commands::play(&ctx, &a),
        Command::Extract(a) => commands::extract(&ctx, &a),
        Command::Rigidity(a) => commands::rigidity(&ctx, &a),
        Command::Params(a) => commands::params(&ctx, &a),
        Command::Sweep(a) => commands::sweep(&ctx, &a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::OutOfRegime(msg)) => {
            eprintln!("error: out of regime: {msg}");
            ExitCode::from(EXIT_OUT_OF_REGIME)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
