//! `mfdfa surrogate`: shuffled-surrogate hypothesis test, JSON report.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use mfdfa_core::surrogate::{surrogate_test, ShuffleKind, SurrogateConfig, SurrogateReport};
use serde::Serialize;

use crate::config::{self, MfdfaFlags, ResolvedMfdfa};
use crate::manifest::{manifest_name, RunManifest};
use crate::output::{mfdfa_echo, write_table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Full,
    Intraday,
    Daily,
}

impl From<KindArg> for ShuffleKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Full => ShuffleKind::Full,
            KindArg::Intraday => ShuffleKind::Intraday,
            KindArg::Daily => ShuffleKind::Daily,
        }
    }
}

#[derive(Debug, Args)]
pub struct SurrogateArgs {
    /// Input returns file.
    #[arg(long)]
    pub returns: PathBuf,
    /// Which temporal structure the reshuffle destroys.
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Ensemble size (>= 100).
    #[arg(short = 'M', long = "ensemble", default_value_t = 100)]
    pub ensemble: usize,
    /// RNG seed (mandatory: runs must be reproducible).
    #[arg(long)]
    pub seed: u64,
    /// Output report (JSON).
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the full d ensemble as CSV for histogramming.
    #[arg(long = "ensemble-csv")]
    pub ensemble_csv: Option<PathBuf>,
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub mfdfa: MfdfaFlags,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    manifest: String,
    #[serde(flatten)]
    report: &'a SurrogateReport,
    config: &'a ResolvedMfdfa,
}

pub fn run(args: SurrogateArgs) -> Result<()> {
    let file = config::load_file_config(args.config.as_deref())?;
    let series = super::read_returns(&args.returns)?;
    let kind: ShuffleKind = args.kind.into();
    if kind == ShuffleKind::Daily && series.days.len() < 2 {
        bail!("daily reshuffling needs >= 2 days (file has {})", series.days.len());
    }
    let n = series.total_returns();
    let (cfg, resolved) = config::resolve_mfdfa(&file, &args.mfdfa, n)?;

    let outcome = surrogate_test(
        &series,
        &SurrogateConfig {
            kind,
            ensemble: args.ensemble,
            seed: args.seed,
            mfdfa: cfg,
        },
    )?;
    if outcome.report.failures > 0 {
        eprintln!(
            "warning: {} of {} surrogate pipelines failed and were excluded",
            outcome.report.failures, args.ensemble
        );
    }

    let doc = ReportDoc {
        manifest: manifest_name(&args.out),
        report: &outcome.report,
        config: &resolved,
    };
    std::fs::write(&args.out, serde_json::to_string_pretty(&doc)? + "\n")
        .with_context(|| format!("cannot write report {}", args.out.display()))?;

    let mut manifest = RunManifest::new("surrogate", &resolved)
        .with_input(&args.returns)?
        .with_seed(args.seed)
        .with_output(&args.out);

    if let Some(csv) = &args.ensemble_csv {
        write_table(
            csv,
            "mfdfa surrogate: d ensemble",
            &manifest_name(&args.out),
            &mfdfa_echo(&resolved),
            "member,d",
            outcome.d_values.iter().enumerate().map(|(i, d)| format!("{i},{d}")),
        )?;
        manifest = manifest.with_output(csv);
    }
    manifest.write_next_to(&args.out)?;

    println!(
        "kind={} M={} observed d={:.4} ensemble mean={:.4} max={:.4} p={}",
        outcome.report.kind,
        args.ensemble,
        outcome.report.observed_d,
        outcome.report.mean,
        outcome.report.max,
        outcome.report.p_label,
    );
    Ok(())
}
