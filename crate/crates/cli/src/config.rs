//! Configuration file handling and grid-spec parsing.
//!
//! Every command accepts `--config FILE` (TOML); command-line flags override
//! file values, which override built-in defaults. The fully resolved
//! configuration is echoed into the run manifest.

use anyhow::{bail, Context, Result};
use mfdfa_core::ingest::{Session, TickFormat};
use mfdfa_core::mfdfa::{log_spaced_scales, MfdfaConfig};
use serde::{Deserialize, Serialize};

/// On-disk configuration; all fields optional so files can be partial.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub session: Option<SessionSection>,
    pub ticks: Option<TicksSection>,
    pub sampling: Option<SamplingSection>,
    pub mfdfa: Option<MfdfaSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionSection {
    /// "HH:MM:SS"
    pub open: Option<String>,
    pub close: Option<String>,
    pub close_cutoff_secs: Option<u32>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TicksSection {
    pub delimiter: Option<char>,
    pub timestamp_format: Option<String>,
    pub timezone: Option<String>,
    pub backstep_tolerance_secs: Option<i64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    pub interval_secs: Option<u32>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MfdfaSection {
    /// "lo:hi:step", e.g. "-5:5:0.25".
    pub q_grid: Option<String>,
    /// "lo:hi:count" with `hi` allowed to be "auto" (resolves to N/4).
    pub scales: Option<String>,
    pub poly_order: Option<usize>,
    pub both_ends: Option<bool>,
    /// "lo:hi" inclusive scale bounds for the log-log fit.
    pub fit_range: Option<String>,
}

pub fn load_file_config(path: Option<&std::path::Path>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot read config file {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("bad config file {}", p.display()))
        }
    }
}

pub fn parse_time(s: &str) -> Result<chrono::NaiveTime> {
    chrono::NaiveTime::parse_from_str(s, "%H:%M:%S")
        .or_else(|_| chrono::NaiveTime::parse_from_str(s, "%H:%M"))
        .with_context(|| format!("bad time of day '{s}' (expected HH:MM[:SS])"))
}

/// Resolve the session window from defaults, file, and flags.
pub fn resolve_session(
    file: &FileConfig,
    open: Option<&str>,
    close: Option<&str>,
    cutoff: Option<u32>,
) -> Result<Session> {
    let mut session = Session::default();
    if let Some(s) = &file.session {
        if let Some(v) = &s.open {
            session.open = parse_time(v)?;
        }
        if let Some(v) = &s.close {
            session.close = parse_time(v)?;
        }
        if let Some(v) = s.close_cutoff_secs {
            session.close_cutoff_secs = v;
        }
    }
    if let Some(v) = open {
        session.open = parse_time(v)?;
    }
    if let Some(v) = close {
        session.close = parse_time(v)?;
    }
    if let Some(v) = cutoff {
        session.close_cutoff_secs = v;
    }
    Ok(session)
}

pub fn resolve_tick_format(
    file: &FileConfig,
    delimiter: Option<char>,
    ts_format: Option<&str>,
    timezone: Option<&str>,
    backstep: Option<i64>,
) -> TickFormat {
    let mut format = TickFormat::default();
    if let Some(t) = &file.ticks {
        if let Some(v) = t.delimiter {
            format.delimiter = v;
        }
        if let Some(v) = &t.timestamp_format {
            format.timestamp_format = v.clone();
        }
        if let Some(v) = &t.timezone {
            format.timezone = v.clone();
        }
        if let Some(v) = t.backstep_tolerance_secs {
            format.backstep_tolerance_secs = v;
        }
    }
    if let Some(v) = delimiter {
        format.delimiter = v;
    }
    if let Some(v) = ts_format {
        format.timestamp_format = v.into();
    }
    if let Some(v) = timezone {
        format.timezone = v.into();
    }
    if let Some(v) = backstep {
        format.backstep_tolerance_secs = v;
    }
    format
}

pub fn resolve_interval(file: &FileConfig, interval: Option<u32>) -> u32 {
    interval
        .or_else(|| file.sampling.as_ref().and_then(|s| s.interval_secs))
        .unwrap_or(15)
}

/// "lo:hi:step" -> inclusive arithmetic grid.
pub fn parse_q_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        bail!("bad q grid '{spec}' (expected lo:hi:step)");
    }
    let lo: f64 = parts[0].parse().with_context(|| format!("bad q lo in '{spec}'"))?;
    let hi: f64 = parts[1].parse().with_context(|| format!("bad q hi in '{spec}'"))?;
    let step: f64 = parts[2].parse().with_context(|| format!("bad q step in '{spec}'"))?;
    if step <= 0.0 || !step.is_finite() || hi < lo {
        bail!("bad q grid '{spec}': need hi >= lo and step > 0");
    }
    let count = ((hi - lo) / step).round() as usize + 1;
    Ok((0..count).map(|i| lo + i as f64 * step).collect())
}

/// Scale-grid request; `hi = None` means "N/4 at run time".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScaleSpec {
    pub lo: usize,
    pub hi: Option<usize>,
    pub count: usize,
}

impl Default for ScaleSpec {
    fn default() -> Self {
        ScaleSpec { lo: 16, hi: None, count: 30 }
    }
}

pub fn parse_scale_spec(spec: &str) -> Result<ScaleSpec> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        bail!("bad scale grid '{spec}' (expected lo:hi:count, hi may be 'auto')");
    }
    let lo: usize = parts[0].parse().with_context(|| format!("bad scale lo in '{spec}'"))?;
    let hi = if parts[1] == "auto" {
        None
    } else {
        Some(parts[1].parse::<usize>().with_context(|| format!("bad scale hi in '{spec}'"))?)
    };
    let count: usize = parts[2].parse().with_context(|| format!("bad scale count in '{spec}'"))?;
    Ok(ScaleSpec { lo, hi, count })
}

pub fn parse_fit_range(spec: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 2 {
        bail!("bad fit range '{spec}' (expected lo:hi)");
    }
    Ok((
        parts[0].parse().with_context(|| format!("bad fit lo in '{spec}'"))?,
        parts[1].parse().with_context(|| format!("bad fit hi in '{spec}'"))?,
    ))
}

/// Flags shared by every command that runs the estimator.
#[derive(Debug, Clone, clap::Args)]
pub struct MfdfaFlags {
    /// Moment grid as lo:hi:step (default -5:5:0.25).
    #[arg(long = "q-grid", allow_hyphen_values = true)]
    pub q_grid: Option<String>,
    /// Scale grid as lo:hi:count; hi may be 'auto' for N/4 (default 16:auto:30).
    #[arg(long)]
    pub scales: Option<String>,
    /// Detrending polynomial order (default 5).
    #[arg(long = "poly-order")]
    pub poly_order: Option<usize>,
    /// Segment from both ends (default true).
    #[arg(long = "both-ends", value_name = "BOOL")]
    pub both_ends: Option<bool>,
    /// Restrict the log-log fit to scales lo:hi.
    #[arg(long = "fit-range")]
    pub fit_range: Option<String>,
}

/// Fully resolved estimator configuration, serialized into manifests.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedMfdfa {
    pub q_grid_spec: String,
    pub q_points: usize,
    pub scale_spec: String,
    pub scales: Vec<usize>,
    pub poly_order: usize,
    pub both_ends: bool,
    pub fit_range: Option<(usize, usize)>,
}

/// Merge defaults, config file, and flags into an [`MfdfaConfig`] for a
/// series of length `n`.
pub fn resolve_mfdfa(file: &FileConfig, flags: &MfdfaFlags, n: usize) -> Result<(MfdfaConfig, ResolvedMfdfa)> {
    let section = file.mfdfa.clone().unwrap_or_default();

    let q_spec = flags
        .q_grid
        .clone()
        .or(section.q_grid)
        .unwrap_or_else(|| "-5:5:0.25".to_string());
    let q_grid = parse_q_grid(&q_spec)?;

    let scale_spec_str = flags.scales.clone().or(section.scales).unwrap_or_else(|| "16:auto:30".into());
    let spec = parse_scale_spec(&scale_spec_str)?;
    let hi = spec.hi.unwrap_or(n / 4);
    let scales = log_spaced_scales(spec.lo, hi, spec.count).map_err(anyhow::Error::from)?;

    let poly_order = flags.poly_order.or(section.poly_order).unwrap_or(5);
    let both_ends = flags.both_ends.or(section.both_ends).unwrap_or(true);
    let fit_range = match (&flags.fit_range, &section.fit_range) {
        (Some(s), _) | (None, Some(s)) => Some(parse_fit_range(s)?),
        (None, None) => None,
    };

    let config = MfdfaConfig {
        q_grid,
        scales: scales.clone(),
        poly_order,
        both_ends,
        fit_range,
    };
    config.validate(n).map_err(anyhow::Error::from)?;

    let resolved = ResolvedMfdfa {
        q_points: config.q_grid.len(),
        q_grid_spec: q_spec,
        scale_spec: scale_spec_str,
        scales,
        poly_order,
        both_ends,
        fit_range,
    };
    Ok((config, resolved))
}
