//! `mfdfa analyze`: returns file -> h(q)/tau(q) tables, singularity spectrum,
//! envelope, and geometry summary.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use mfdfa_core::mfdfa;
use mfdfa_core::spectrum;
use serde::Serialize;

use crate::config::{self, MfdfaFlags, ResolvedMfdfa};
use crate::manifest::{manifest_name, RunManifest};
use crate::output::{mfdfa_echo, write_table};

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Input returns file.
    #[arg(long)]
    pub returns: PathBuf,
    /// Prefix for the output tables (<prefix>.hq.csv, .fq.csv,
    /// .spectrum.csv, .envelope.csv, .summary.json).
    #[arg(long = "out-prefix")]
    pub out_prefix: PathBuf,
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub mfdfa: MfdfaFlags,
}

#[derive(Serialize)]
struct SummaryDoc<'a> {
    manifest: String,
    n: usize,
    days: usize,
    h2: Option<f64>,
    tau2: Option<f64>,
    #[serde(flatten)]
    summary: &'a spectrum::SpectrumSummary,
    non_concave_q: &'a [f64],
    failed_q: &'a [f64],
    config: &'a ResolvedMfdfa,
}

pub fn run(args: AnalyzeArgs) -> Result<()> {
    let file = config::load_file_config(args.config.as_deref())?;
    let series = super::read_returns(&args.returns)?;
    let flat = series.flatten();
    let (cfg, resolved) = config::resolve_mfdfa(&file, &args.mfdfa, flat.len())?;

    let (surface, exponents) = mfdfa::analyze(&flat, &cfg)?;
    for q in &exponents.failed {
        eprintln!("warning: fit failed at q = {q} (too few usable scales)");
    }
    let spec = spectrum::legendre_points(&exponents)?;
    if !spec.is_concave() {
        eprintln!(
            "warning: tau(q) is not concave; alpha increases at q = {:?}",
            spec.non_concave_q
        );
    }
    let samples = spectrum::envelope_samples(&spec.summary, 0.05, 201);
    let env = spectrum::envelope(&exponents.tau_pairs(), &samples)?;

    let prefix = &args.out_prefix;
    let manifest_ref = manifest_name(prefix);
    let echo = mfdfa_echo(&resolved);

    let hq_path = with_suffix(prefix, ".hq.csv");
    write_table(
        &hq_path,
        "mfdfa analyze: generalized Hurst exponents",
        &manifest_ref,
        &echo,
        "q,h,h_stderr,tau,r2,intercept",
        exponents.fits.iter().map(|f| {
            format!("{},{},{},{},{},{}", f.q, f.h, f.h_stderr, f.tau, f.r2, f.intercept)
        }),
    )?;

    let fq_path = with_suffix(prefix, ".fq.csv");
    write_table(
        &fq_path,
        "mfdfa analyze: fluctuation surface",
        &manifest_ref,
        &echo,
        "q,s,F,segments",
        surface.q_grid.iter().enumerate().flat_map(|(qi, &q)| {
            let surface = &surface;
            surface.scales.iter().enumerate().map(move |(si, &s)| {
                format!("{},{},{},{}", q, s, surface.values[qi][si], surface.segments_used[qi][si])
            })
        }),
    )?;

    let spectrum_path = with_suffix(prefix, ".spectrum.csv");
    write_table(
        &spectrum_path,
        "mfdfa analyze: singularity spectrum",
        &manifest_ref,
        &echo,
        "q,alpha,f",
        spec.points.iter().map(|p| format!("{},{},{}", p.q, p.alpha, p.f)),
    )?;

    let envelope_path = with_suffix(prefix, ".envelope.csv");
    write_table(
        &envelope_path,
        "mfdfa analyze: envelope of y(alpha) = q alpha - tau(q)",
        &manifest_ref,
        &echo,
        "alpha,y",
        env.iter().map(|(alpha, y)| format!("{alpha},{y}")),
    )?;

    let summary_path = with_suffix(prefix, ".summary.json");
    let doc = SummaryDoc {
        manifest: manifest_ref.clone(),
        n: flat.len(),
        days: series.days.len(),
        h2: exponents.h_at(2.0),
        tau2: exponents.tau_at(2.0),
        summary: &spec.summary,
        non_concave_q: &spec.non_concave_q,
        failed_q: &exponents.failed,
        config: &resolved,
    };
    std::fs::write(&summary_path, serde_json::to_string_pretty(&doc)? + "\n")?;

    RunManifest::new("analyze", &resolved)
        .with_input(&args.returns)?
        .with_output(&hq_path)
        .with_output(&fq_path)
        .with_output(&spectrum_path)
        .with_output(&envelope_path)
        .with_output(&summary_path)
        .write_next_to(prefix)?;

    println!(
        "n={} days={} h(2)={} alpha=[{}, {}] alpha0={} width={}",
        flat.len(),
        series.days.len(),
        doc.h2.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into()),
        format_args!("{:.4}", spec.summary.alpha_min),
        format_args!("{:.4}", spec.summary.alpha_max),
        format_args!("{:.4}", spec.summary.alpha_zero),
        format_args!("{:.4}", spec.summary.width),
    );
    Ok(())
}

fn with_suffix(prefix: &std::path::Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}
