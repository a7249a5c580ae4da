//! Shuffled-surrogate tests for the origin of multifractality.
//!
//! Reshuffling preserves the value distribution while destroying temporal
//! structure, so the distance of the estimated `tau(q)` from the i.i.d.
//! finite-variance null `tau(q) = q/2 - 1`,
//!
//! ```text
//! d = sqrt( sum_q (tau(q) - (q/2 - 1))^2 )
//! ```
//!
//! separates distribution-borne from correlation-borne multifractality. Each
//! ensemble member reruns the whole estimation pipeline with the identical
//! configuration so the statistic stays exchangeable under the null.
//!
//! Shuffles are Fisher-Yates over a ChaCha12 stream; intraday reshuffles use
//! one documented sub-stream per day (stream = day index + 1) and each
//! ensemble member derives its own seed from (seed, member index), so the
//! report does not depend on the worker count.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mfdfa::{self, MfdfaConfig};
use crate::returns::{DayBlock, ReturnSeries};

/// Which temporal structure the reshuffle destroys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShuffleKind {
    /// One permutation of every return across all days.
    Full,
    /// Independent permutations within each day; day order fixed.
    Intraday,
    /// Permutation of whole-day blocks; within-day order fixed.
    Daily,
}

impl ShuffleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ShuffleKind::Full => "full",
            ShuffleKind::Intraday => "intraday",
            ShuffleKind::Daily => "daily",
        }
    }
}

impl std::str::FromStr for ShuffleKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(ShuffleKind::Full),
            "intraday" => Ok(ShuffleKind::Intraday),
            "daily" => Ok(ShuffleKind::Daily),
            other => Err(Error::Config(format!("unknown shuffle kind '{other}'"))),
        }
    }
}

/// Permute a return series. The multiset of values is preserved exactly; the
/// day partition (dates and block lengths) stays in place.
pub fn shuffle(series: &ReturnSeries, kind: ShuffleKind, seed: u64) -> Result<ReturnSeries> {
    if series.total_returns() == 0 {
        return Err(Error::Empty("nothing to shuffle".into()));
    }
    let mut out = series.clone();
    match kind {
        ShuffleKind::Full => {
            let mut flat = series.flatten();
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            flat.shuffle(&mut rng);
            let mut offset = 0;
            for day in &mut out.days {
                let len = day.returns.len();
                day.returns.copy_from_slice(&flat[offset..offset + len]);
                offset += len;
            }
        }
        ShuffleKind::Intraday => {
            for (i, day) in out.days.iter_mut().enumerate() {
                let mut rng = ChaCha12Rng::seed_from_u64(seed);
                rng.set_stream(i as u64 + 1);
                day.returns.shuffle(&mut rng);
            }
        }
        ShuffleKind::Daily => {
            let mut order: Vec<usize> = (0..series.days.len()).collect();
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            order.shuffle(&mut rng);
            out.days = series
                .days
                .iter()
                .zip(order)
                .map(|(slot, src)| DayBlock {
                    date: slot.date,
                    returns: series.days[src].returns.clone(),
                })
                .collect();
        }
    }
    Ok(out)
}

/// The observed distance statistic plus bookkeeping about excluded grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DStat {
    pub d: f64,
    pub grid_points: usize,
    pub excluded: usize,
}

/// l2 distance of `tau(q)` from the i.i.d. finite-variance null `q/2 - 1`
/// over the fitted grid. Non-finite tau values are excluded and counted.
pub fn d_statistic(tau_pairs: &[(f64, f64)]) -> Result<DStat> {
    let mut sum = 0.0;
    let mut used = 0usize;
    let mut excluded = 0usize;
    for &(q, tau) in tau_pairs {
        if tau.is_finite() {
            let dev = tau - (q / 2.0 - 1.0);
            sum += dev * dev;
            used += 1;
        } else {
            excluded += 1;
        }
    }
    if used == 0 {
        return Err(Error::Degenerate("no finite tau values for the d statistic".into()));
    }
    Ok(DStat {
        d: sum.sqrt(),
        grid_points: used,
        excluded,
    })
}

/// Surrogate ensemble parameters.
#[derive(Debug, Clone)]
pub struct SurrogateConfig {
    pub kind: ShuffleKind,
    /// Ensemble size; at least 100.
    pub ensemble: usize,
    pub seed: u64,
    pub mfdfa: MfdfaConfig,
}

/// Ensemble summary in the shape of the report tables: mean, std, extremes,
/// upper percentiles, and the one-sided empirical p-value.
#[derive(Debug, Clone, Serialize)]
pub struct SurrogateReport {
    pub kind: &'static str,
    pub ensemble_size: usize,
    pub succeeded: usize,
    pub failures: usize,
    pub seed: u64,
    pub rng_algorithm: &'static str,
    pub observed_d: f64,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub p99: f64,
    pub p999: f64,
    /// `(1 + #{d_surr >= d_obs}) / (succeeded + 1)`; never exactly zero.
    pub p_value: f64,
    /// Human-readable p-value, `"< 1/M"` style when the observed statistic
    /// exceeds every surrogate.
    pub p_label: String,
    pub q_grid: Vec<f64>,
}

/// Full surrogate-test outcome: the report plus the raw ensemble (ordered by
/// member index) for histogramming.
#[derive(Debug, Clone)]
pub struct SurrogateOutcome {
    pub report: SurrogateReport,
    pub d_values: Vec<f64>,
}

/// SplitMix64 step; derives independent member seeds from (seed, index).
fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn pipeline_d(series: &ReturnSeries, config: &MfdfaConfig) -> Result<f64> {
    let flat = series.flatten();
    let (_, exponents) = mfdfa::analyze(&flat, config)?;
    Ok(d_statistic(&exponents.tau_pairs())?.d)
}

/// Run the MF-DFA -> tau -> d pipeline on the original series and on an
/// ensemble of surrogates; members run in parallel and are merged in index
/// order so the outcome is independent of scheduling.
pub fn surrogate_test(series: &ReturnSeries, config: &SurrogateConfig) -> Result<SurrogateOutcome> {
    if config.ensemble < 100 {
        return Err(Error::Config(format!(
            "ensemble size {} is below the minimum of 100",
            config.ensemble
        )));
    }
    let observed_d = pipeline_d(series, &config.mfdfa)?;

    let member_results: Vec<Result<f64>> = (0..config.ensemble)
        .into_par_iter()
        .map(|i| {
            let surrogate = shuffle(series, config.kind, mix_seed(config.seed, i as u64))?;
            pipeline_d(&surrogate, &config.mfdfa)
        })
        .collect();

    let mut d_values = Vec::with_capacity(config.ensemble);
    let mut failures = 0usize;
    for r in member_results {
        match r {
            Ok(d) => d_values.push(d),
            Err(_) => failures += 1,
        }
    }
    // More than 1% failed pipelines voids the ensemble.
    if failures * 100 > config.ensemble {
        return Err(Error::EnsembleFailures {
            failed: failures,
            total: config.ensemble,
            threshold: (config.ensemble / 100).max(1),
        });
    }
    if d_values.is_empty() {
        return Err(Error::Degenerate("every surrogate pipeline failed".into()));
    }

    let succeeded = d_values.len();
    let nf = succeeded as f64;
    let mean = d_values.iter().sum::<f64>() / nf;
    let var = if succeeded > 1 {
        d_values.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (nf - 1.0)
    } else {
        0.0
    };
    let mut sorted = d_values.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let exceed = sorted.iter().filter(|&&d| d >= observed_d).count();
    let p_value = (1 + exceed) as f64 / (nf + 1.0);
    let p_label = if exceed == 0 {
        format!("< 1/{}", succeeded + 1)
    } else {
        format!("{p_value}")
    };

    let report = SurrogateReport {
        kind: config.kind.as_str(),
        ensemble_size: config.ensemble,
        succeeded,
        failures,
        seed: config.seed,
        rng_algorithm: crate::RNG_ALGORITHM,
        observed_d,
        mean,
        std: var.sqrt(),
        min: sorted[0],
        max: *sorted.last().unwrap(),
        p99: quantile(&sorted, 0.99),
        p999: quantile(&sorted, 0.999),
        p_value,
        p_label,
        q_grid: config.mfdfa.q_grid.clone(),
    };
    Ok(SurrogateOutcome { report, d_values })
}

/// Linearly interpolated empirical quantile of a sorted sample.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = pos - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}
