//! Command-line pipeline for multifractal analysis of intraday returns.
//!
//! Exit codes: 0 success, 1 input/configuration error, 2 numerical or
//! degenerate failure.

mod commands;
mod config;
mod manifest;
mod output;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "mfdfa",
    version,
    about = "Multifractal scaling analysis of intraday return series",
    propagate_version = true
)]
struct Cli {
    /// Cap the worker-thread count; results are identical for any value.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse tick data and emit day-partitioned intraday log-returns.
    Ingest(commands::ingest::IngestArgs),
    /// Generate synthetic series with analytically known exponents.
    Generate(commands::generate::GenerateArgs),
    /// Estimate h(q), tau(q), and the singularity spectrum.
    Analyze(commands::analyze::AnalyzeArgs),
    /// Shuffled-surrogate test of the d statistic against the i.i.d. null.
    Surrogate(commands::surrogate::SurrogateArgs),
    /// Correlogram of raw or transformed returns with white-noise bands.
    Acf(commands::acf::AcfArgs),
    /// Intraday volatility profile (mean |return| per slot).
    Profile(commands::profile::ProfileArgs),
}

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // Ignore failure: the pool can only be installed once (tests).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let result = match cli.command {
        Command::Ingest(args) => commands::ingest::run(args),
        Command::Generate(args) => commands::generate::run(args),
        Command::Analyze(args) => commands::analyze::run(args),
        Command::Surrogate(args) => commands::surrogate::run(args),
        Command::Acf(args) => commands::acf::run(args),
        Command::Profile(args) => commands::profile::run(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(exit_code(&err));
    }
}

/// 1 for input problems, 2 for numerical/degenerate failures.
fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<mfdfa_core::Error>() {
            return match core {
                mfdfa_core::Error::Degenerate(_) | mfdfa_core::Error::EnsembleFailures { .. } => 2,
                _ => 1,
            };
        }
    }
    1
}
