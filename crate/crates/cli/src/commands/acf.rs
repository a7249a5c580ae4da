//! `mfdfa acf`: correlogram of a (transformed) return series.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use mfdfa_core::correl::{self, Normalization, Transform};
use serde::Serialize;

use crate::config;
use crate::manifest::{manifest_name, RunManifest};
use crate::output::write_table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformArg {
    Raw,
    Absolute,
    Squared,
}

impl From<TransformArg> for Transform {
    fn from(t: TransformArg) -> Self {
        match t {
            TransformArg::Raw => Transform::Raw,
            TransformArg::Absolute => Transform::Absolute,
            TransformArg::Squared => Transform::Squared,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizationArg {
    Biased,
    Unbiased,
}

impl From<NormalizationArg> for Normalization {
    fn from(n: NormalizationArg) -> Self {
        match n {
            NormalizationArg::Biased => Normalization::Biased,
            NormalizationArg::Unbiased => Normalization::Unbiased,
        }
    }
}

#[derive(Debug, Args)]
pub struct AcfArgs {
    /// Input returns file.
    #[arg(long)]
    pub returns: PathBuf,
    /// Pointwise transform before correlating (default raw).
    #[arg(long, value_enum)]
    pub transform: Option<TransformArg>,
    /// Largest lag, in sampling intervals (default: 30 day-lengths, capped
    /// below N/2; requires uniform day length).
    #[arg(long = "max-lag")]
    pub max_lag: Option<usize>,
    /// ACF normalization (default biased, which keeps |acf| <= 1).
    #[arg(long, value_enum)]
    pub normalization: Option<NormalizationArg>,
    /// Exclude product terms that straddle a day boundary.
    #[arg(long = "within-days")]
    pub within_days: bool,
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV (lag, acf, band).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct AcfEcho {
    transform: String,
    normalization: String,
    within_days: bool,
    max_lag: usize,
    n: usize,
}

pub fn run(args: AcfArgs) -> Result<()> {
    // Validate the config file even though acf has no file-backed settings
    // beyond the shared sections; flags always win.
    let _ = config::load_file_config(args.config.as_deref())?;
    let series = super::read_returns(&args.returns)?;
    let flat = series.flatten();
    let max_lag = match args.max_lag {
        Some(k) => k,
        None => match series.uniform_day_len() {
            Some(day_len) => (30 * day_len).min(flat.len() / 2 - 1),
            None => bail!("days are ragged; pass --max-lag explicitly"),
        },
    };
    let transform: Transform = args.transform.unwrap_or(TransformArg::Raw).into();
    let normalization: Normalization =
        args.normalization.unwrap_or(NormalizationArg::Biased).into();

    let cg = if args.within_days {
        correl::acf_within_days(&series, max_lag, transform, normalization)?
    } else {
        correl::acf_with(&flat, max_lag, transform, normalization)?
    };

    let echo = AcfEcho {
        transform: transform.as_str().into(),
        normalization: if normalization == Normalization::Biased { "biased" } else { "unbiased" }.into(),
        within_days: args.within_days,
        max_lag,
        n: cg.n,
    };
    write_table(
        &args.out,
        "mfdfa acf: correlogram",
        &manifest_name(&args.out),
        &format!(
            "transform={} normalization={} within_days={} max_lag={} n={}",
            echo.transform, echo.normalization, echo.within_days, max_lag, cg.n
        ),
        "lag,acf,band",
        cg.acf.iter().enumerate().map(|(lag, rho)| format!("{lag},{rho},{}", cg.band)),
    )?;

    RunManifest::new("acf", echo)
        .with_input(&args.returns)?
        .with_output(&args.out)
        .write_next_to(&args.out)?;

    let outside = cg.acf[1..].iter().filter(|v| v.abs() > cg.band).count();
    println!(
        "n={} max_lag={} band=±{:.5} lags outside band: {}/{}",
        cg.n, max_lag, cg.band, outside, max_lag
    );
    Ok(())
}
