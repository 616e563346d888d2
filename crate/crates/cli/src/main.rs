//! `roadnet` — build simplified road networks, percolate them under random
//! failure and betweenness attack, and measure service reachability.
//!
//! Subcommands write plot-ready CSV/JSON artifacts under
//! `<out>/<city>/`; `report` consolidates several cities. Exit codes:
//! 0 success, 1 runtime failure, 2 invalid input.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "roadnet", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the simplified giant-component network from a paths file.
    Build(BuildArgs),
    /// Run percolation experiments and detect thresholds.
    Percolate(PercolateArgs),
    /// Bind venues to nodes and measure availability at the threshold.
    Services(ServicesArgs),
    /// Consolidate per-city summaries into rankings and a correlation.
    Report(ReportArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Error,
    Attack,
    Both,
}

impl Mode {
    fn runs_error(self) -> bool {
        matches!(self, Mode::Error | Mode::Both)
    }
    fn runs_attack(self) -> bool {
        matches!(self, Mode::Attack | Mode::Both)
    }
}

#[derive(Args)]
pub struct BuildArgs {
    /// City name; artifacts land in <out>/<city>/.
    #[arg(long)]
    city: String,
    /// Paths file (one JSON object per line).
    #[arg(long)]
    paths: PathBuf,
    /// Output directory root.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct PercolateArgs {
    #[arg(long)]
    city: String,
    /// Paths file; only needed when the city has not been built yet.
    #[arg(long)]
    paths: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Which percolation scheme(s) to run.
    #[arg(long, value_enum, default_value = "both")]
    mode: Mode,
    /// Error-scheme repetitions.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
    runs: u32,
    /// Fraction of edges removed between error checkpoints, in (0, 0.5].
    #[arg(long, default_value_t = 0.01, value_parser = parse_checkpoint_fraction)]
    checkpoint_fraction: f64,
    /// Base RNG seed; error run i uses seed + i.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Recompute betweenness every N attack removals.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    recompute_every: u32,
}

#[derive(Args)]
pub struct ServicesArgs {
    #[arg(long)]
    city: String,
    #[arg(long)]
    paths: Option<PathBuf>,
    /// Venues CSV (venue_id,category,lat,lon).
    #[arg(long)]
    venues: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    mode: Mode,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
    runs: u32,
    #[arg(long, default_value_t = 0.01, value_parser = parse_checkpoint_fraction)]
    checkpoint_fraction: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    recompute_every: u32,
    /// Venues farther than this from every node are omitted.
    #[arg(long, default_value_t = 2.0, value_parser = parse_positive_km)]
    radius_km: f64,
}

#[derive(Args)]
pub struct ReportArgs {
    /// Output root holding per-city directories with summary.json files.
    #[arg(long)]
    out: PathBuf,
}

fn parse_checkpoint_fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if v > 0.0 && v <= 0.5 {
        Ok(v)
    } else {
        Err(format!("checkpoint fraction {v} outside (0, 0.5]"))
    }
}

fn parse_positive_km(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("radius {v} must be positive"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(args) => commands::build(&args),
        Command::Percolate(args) => commands::percolate(&args),
        Command::Services(args) => commands::services(&args),
        Command::Report(args) => commands::report(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
