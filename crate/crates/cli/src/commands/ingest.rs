//! `mfdfa ingest`: tick file -> day-partitioned returns file.

use std::io::BufReader;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use mfdfa_core::ingest::{log_returns, parse_ticks, resample};
use serde::Serialize;

use crate::config::{self, FileConfig};
use crate::manifest::{manifest_name, RunManifest};

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Tick file: delimiter-separated (timestamp, price) records.
    #[arg(long)]
    pub ticks: PathBuf,
    /// Output returns file.
    #[arg(long)]
    pub out: PathBuf,
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Fail on the first malformed record instead of skipping it.
    #[arg(long)]
    pub strict: bool,
    /// Session open, HH:MM[:SS].
    #[arg(long)]
    pub open: Option<String>,
    /// Session close, HH:MM[:SS].
    #[arg(long)]
    pub close: Option<String>,
    /// Seconds trimmed before the nominal close.
    #[arg(long)]
    pub cutoff: Option<u32>,
    /// Sampling interval in seconds.
    #[arg(long)]
    pub interval: Option<u32>,
    /// Field delimiter of the tick file.
    #[arg(long)]
    pub delimiter: Option<char>,
    /// chrono timestamp format of the tick file.
    #[arg(long = "ts-format")]
    pub ts_format: Option<String>,
    /// Exchange-local timezone label (informational).
    #[arg(long)]
    pub timezone: Option<String>,
    /// Largest tolerated backwards timestamp step, seconds.
    #[arg(long = "backstep-tolerance")]
    pub backstep_tolerance: Option<i64>,
}

#[derive(Serialize)]
struct IngestEcho {
    session_open: String,
    session_close: String,
    close_cutoff_secs: u32,
    interval_secs: u32,
    delimiter: char,
    timestamp_format: String,
    timezone: String,
    backstep_tolerance_secs: i64,
    strict: bool,
}

pub fn run(args: IngestArgs) -> Result<()> {
    let file: FileConfig = config::load_file_config(args.config.as_deref())?;
    let session = config::resolve_session(
        &file,
        args.open.as_deref(),
        args.close.as_deref(),
        args.cutoff,
    )?;
    let format = config::resolve_tick_format(
        &file,
        args.delimiter,
        args.ts_format.as_deref(),
        args.timezone.as_deref(),
        args.backstep_tolerance,
    );
    let interval = config::resolve_interval(&file, args.interval);

    let reader = BufReader::new(
        std::fs::File::open(&args.ticks)
            .with_context(|| format!("cannot open tick file {}", args.ticks.display()))?,
    );
    let (ticks, parse_warnings) = parse_ticks(reader, &format, &session, args.strict)?;
    for w in &parse_warnings {
        eprintln!("warning: line {}: {}", w.line, w.msg);
    }
    let (grids, resample_warnings) = resample(&ticks, interval)?;
    for w in &resample_warnings {
        eprintln!("warning: {w}");
    }
    let (series, return_warnings) = log_returns(&grids, interval)?;
    for w in &return_warnings {
        eprintln!("warning: {w}");
    }
    // Short sessions (late first tick, early close) are kept but flagged.
    if let Some(longest) = series.days.iter().map(|d| d.returns.len()).max() {
        let short = series.days.iter().filter(|d| d.returns.len() < longest).count();
        if short > 0 {
            eprintln!(
                "warning: {short} of {} days are shorter than the longest day ({longest} returns); kept as-is",
                series.days.len()
            );
        }
    }

    let mut out = std::io::BufWriter::new(
        std::fs::File::create(&args.out)
            .with_context(|| format!("cannot create {}", args.out.display()))?,
    );
    series.write_to(&mut out)?;
    drop(out);

    let echo = IngestEcho {
        session_open: session.open.format("%H:%M:%S").to_string(),
        session_close: session.close.format("%H:%M:%S").to_string(),
        close_cutoff_secs: session.close_cutoff_secs,
        interval_secs: interval,
        delimiter: format.delimiter,
        timestamp_format: format.timestamp_format.clone(),
        timezone: format.timezone.clone(),
        backstep_tolerance_secs: format.backstep_tolerance_secs,
        strict: args.strict,
    };
    RunManifest::new("ingest", echo)
        .with_input(&args.ticks)?
        .with_output(&args.out)
        .write_next_to(&args.out)?;

    println!(
        "ingested {} ticks into {} days, {} returns -> {} (manifest {})",
        ticks.ticks.len(),
        series.days.len(),
        series.total_returns(),
        args.out.display(),
        manifest_name(&args.out),
    );
    Ok(())
}
