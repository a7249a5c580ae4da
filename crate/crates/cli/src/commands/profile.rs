//! `mfdfa profile`: mean |return| per intraday slot (volatility pattern).

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use mfdfa_core::correl::intraday_volatility_profile;
use serde::Serialize;

use crate::manifest::{manifest_name, RunManifest};
use crate::output::write_table;

#[derive(Debug, Args)]
pub struct ProfileArgs {
    /// Input returns file.
    #[arg(long)]
    pub returns: PathBuf,
    /// TOML configuration file (accepted for uniformity; profile has no
    /// tunables).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV (slot, mean_abs_return).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct ProfileEcho {
    days: usize,
    slots: usize,
}

pub fn run(args: ProfileArgs) -> Result<()> {
    let _ = crate::config::load_file_config(args.config.as_deref())?;
    let series = super::read_returns(&args.returns)?;
    let (profile, warning) = intraday_volatility_profile(&series)?;
    if let Some(w) = warning {
        eprintln!("warning: {w}");
    }

    write_table(
        &args.out,
        "mfdfa profile: intraday mean |return| per slot",
        &manifest_name(&args.out),
        &format!("days={} slots={}", series.days.len(), profile.len()),
        "slot,mean_abs_return",
        profile.iter().enumerate().map(|(slot, v)| format!("{slot},{v}")),
    )?;

    RunManifest::new(
        "profile",
        ProfileEcho {
            days: series.days.len(),
            slots: profile.len(),
        },
    )
    .with_input(&args.returns)?
    .with_output(&args.out)
    .write_next_to(&args.out)?;

    println!("profiled {} slots over {} days -> {}", profile.len(), series.days.len(), args.out.display());
    Ok(())
}
