//! `qaffine`: run identity checks, spectra, cluster explorations and stable
//! envelope computations from the command line.

mod chain_cmd;
mod cluster_cmd;
mod report;
mod rmat_cmd;
mod stab_cmd;

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use qaffine_core::{Error, Result};

use report::Run;

#[derive(Parser, Debug)]
#[command(name = "qaffine", version, about = "Exact and numeric checks for quantum affine sl2 structures")]
struct Cli {
    /// Emit the machine-readable JSON report.
    #[arg(long, global = true)]
    json: bool,
    /// Include wall-clock timing in the report.
    #[arg(long, global = true)]
    timing: bool,
    /// Run the check on its documented perturbed input; it must fail.
    #[arg(long, global = true)]
    negative_control: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// R-matrix identities.
    Rmat {
        #[command(subcommand)]
        sub: rmat_cmd::RmatCmd,
    },
    /// Spin-chain checks, spectra and Baxter data.
    Chain(ChainArgs),
    /// Cluster mutation and exploration.
    Cluster(ClusterArgs),
    /// Stable envelopes on T*P^n.
    Stab(StabArgs),
}

#[derive(Args, Debug)]
pub struct ChainArgs {
    #[arg(value_enum)]
    pub sub: chain_cmd::ChainSub,
    /// Chain description (JSON).
    #[arg(long)]
    pub spec: String,
    /// Number of lowered spins.
    #[arg(long, default_value_t = 0)]
    pub sector: usize,
    /// Residual tolerance overriding the default of the check.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Number of sample points for spectra.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Seed for sample points; defaults to the spec's seed, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Second auxiliary evaluation parameter for multiplicativity.
    #[arg(long, default_value = "2")]
    pub aux2: String,
}

#[derive(Args, Debug)]
pub struct ClusterArgs {
    #[arg(value_enum)]
    pub sub: cluster_cmd::ClusterSub,
    /// Quiver description (JSON).
    #[arg(long)]
    pub quiver: String,
    /// Exploration depth.
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Vertex (1-based) to mutate at; repeat to mutate in sequence.
    #[arg(long = "at")]
    pub at: Vec<usize>,
}

#[derive(Args, Debug)]
pub struct StabArgs {
    #[arg(value_enum)]
    pub sub: stab_cmd::StabSub,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// `plus`/`minus` for n = 1, or the ascending order of fixed points, e.g. `2,0,1`.
    #[arg(long)]
    pub chamber: Option<String>,
    /// Source chamber of a geometric R-matrix.
    #[arg(long)]
    pub from: Option<String>,
    /// Target chamber of a geometric R-matrix.
    #[arg(long)]
    pub to: Option<String>,
    /// Comma separated ±1 per fixed point.
    #[arg(long, allow_hyphen_values = true)]
    pub polarization: Option<String>,
    /// Codimension-2 face, e.g. `u1=u2=0`.
    #[arg(long)]
    pub face: Option<String>,
    /// Stable-envelope spec file (JSON) instead of flags.
    #[arg(long)]
    pub spec: Option<String>,
}

pub struct Flags {
    pub control: bool,
}

pub fn read_file(path: &str) -> Result<String> {
    std::fs::read_to_string(Path::new(path)).map_err(|e| Error::InvalidSpec(format!("{path}: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = Run { json: cli.json, timing: cli.timing, start: Instant::now() };
    let flags = Flags { control: cli.negative_control };
    let result = match cli.command {
        Command::Rmat { sub } => rmat_cmd::run(sub, &flags),
        Command::Chain(a) => chain_cmd::run(&a, &flags),
        Command::Cluster(a) => cluster_cmd::run(&a, &flags),
        Command::Stab(a) => stab_cmd::run(&a, &flags),
    };
    run.finish(result)
}
