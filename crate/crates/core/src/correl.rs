//! Autocorrelation analysis of raw and nonlinear return transforms.
//!
//! The sample ACF uses the biased 1/N normalization, which keeps
//! `|rho(k)| <= 1` and matches the usual correlogram bands
//! `+-1.96/sqrt(N)`. Long-lag correlograms are computed through an
//! FFT (zero-padded, so linear rather than circular); [`acf_reference`] is
//! the direct O(N k) route kept as a cross-check.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::returns::ReturnSeries;

/// Pointwise transform applied before correlating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    Raw,
    Absolute,
    Squared,
}

impl Transform {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Transform::Raw => x,
            Transform::Absolute => x.abs(),
            Transform::Squared => x * x,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Transform::Raw => "raw",
            Transform::Absolute => "absolute",
            Transform::Squared => "squared",
        }
    }
}

impl std::str::FromStr for Transform {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "raw" => Ok(Transform::Raw),
            "absolute" | "abs" => Ok(Transform::Absolute),
            "squared" | "sq" => Ok(Transform::Squared),
            other => Err(Error::Config(format!("unknown transform '{other}'"))),
        }
    }
}

/// ACF normalization. `Biased` (1/N) keeps `|rho| <= 1` and matches the
/// white-noise bands; `Unbiased` (1/(N-k)) is exposed for sensitivity
/// analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Biased,
    Unbiased,
}

impl std::str::FromStr for Normalization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "biased" => Ok(Normalization::Biased),
            "unbiased" => Ok(Normalization::Unbiased),
            other => Err(Error::Config(format!("unknown normalization '{other}'"))),
        }
    }
}

/// Sample autocorrelation out to `max_lag`, with the white-noise band.
#[derive(Debug, Clone)]
pub struct Correlogram {
    pub transform: Transform,
    pub n: usize,
    /// `+-1.96/sqrt(N)`, the 95% interval for white noise.
    pub band: f64,
    /// `acf[k]` is the autocorrelation at lag k; `acf[0] == 1`.
    pub acf: Vec<f64>,
}

/// Biased sample ACF of the transformed series.
pub fn acf(series: &[f64], max_lag: usize, transform: Transform) -> Result<Correlogram> {
    acf_with(series, max_lag, transform, Normalization::Biased)
}

/// Sample ACF with an explicit normalization choice.
pub fn acf_with(
    series: &[f64],
    max_lag: usize,
    transform: Transform,
    normalization: Normalization,
) -> Result<Correlogram> {
    let n = series.len();
    let centered = center(series, max_lag, transform)?;
    let c0: f64 = centered.iter().map(|&v| v * v).sum();
    if c0 <= 0.0 {
        return Err(Error::Degenerate("zero-variance series".into()));
    }

    let raw = autocovariance_fft(&centered, max_lag);
    let acf: Vec<f64> = raw
        .iter()
        .enumerate()
        .map(|(k, &c)| match normalization {
            Normalization::Biased => c / c0,
            Normalization::Unbiased => c / c0 * n as f64 / (n - k) as f64,
        })
        .collect();
    Ok(Correlogram {
        transform,
        n,
        band: 1.96 / (n as f64).sqrt(),
        acf,
    })
}

/// Sample ACF with cross-day product terms excluded: only pairs inside the
/// same day enter the lag sums (the centering mean and the variance stay
/// global). Sensitivity-analysis companion to the concatenated [`acf`];
/// requires `max_lag` below the longest day.
pub fn acf_within_days(
    series: &crate::returns::ReturnSeries,
    max_lag: usize,
    transform: Transform,
    normalization: Normalization,
) -> Result<Correlogram> {
    let flat = series.flatten();
    let n = flat.len();
    let longest = series.days.iter().map(|d| d.returns.len()).max().unwrap_or(0);
    if max_lag >= longest {
        return Err(Error::Config(format!(
            "max lag {max_lag} leaves no within-day pair (longest day has {longest} returns)"
        )));
    }
    let centered = center(&flat, max_lag, transform)?;
    let c0: f64 = centered.iter().map(|&v| v * v).sum();
    if c0 <= 0.0 {
        return Err(Error::Degenerate("zero-variance series".into()));
    }

    let mut sums = vec![0.0_f64; max_lag + 1];
    let mut pairs = vec![0usize; max_lag + 1];
    let mut offset = 0usize;
    for day in &series.days {
        let len = day.returns.len();
        if len == 0 {
            continue;
        }
        let day_centered = &centered[offset..offset + len];
        offset += len;
        let kmax = max_lag.min(len - 1);
        let raw = autocovariance_fft(day_centered, kmax);
        for (k, &c) in raw.iter().enumerate() {
            sums[k] += c;
            pairs[k] += len - k;
        }
    }

    let acf: Vec<f64> = sums
        .iter()
        .zip(&pairs)
        .map(|(&c, &p)| match normalization {
            Normalization::Biased => c / c0,
            Normalization::Unbiased => {
                if p == 0 {
                    0.0
                } else {
                    (c / p as f64) / (c0 / n as f64)
                }
            }
        })
        .collect();
    Ok(Correlogram {
        transform,
        n,
        band: 1.96 / (n as f64).sqrt(),
        acf,
    })
}

fn center(series: &[f64], max_lag: usize, transform: Transform) -> Result<Vec<f64>> {
    let n = series.len();
    if n < 4 {
        return Err(Error::Config(format!("series of length {n} is too short for an ACF")));
    }
    if max_lag >= n / 2 {
        return Err(Error::Config(format!(
            "max lag {max_lag} must be below N/2 = {}",
            n / 2
        )));
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config("series contains non-finite values".into()));
    }
    let y: Vec<f64> = series.iter().map(|&x| transform.apply(x)).collect();
    let mean = y.iter().sum::<f64>() / n as f64;
    Ok(y.iter().map(|&v| v - mean).collect())
}

/// Unnormalized autocovariance sums for lags `0..=max_lag` via a zero-padded
/// FFT (linear correlation).
fn autocovariance_fft(centered: &[f64], max_lag: usize) -> Vec<f64> {
    let n = centered.len();
    let size = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = centered
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for v in buf.iter_mut() {
        *v = Complex::new(v.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let scale = size as f64;
    let mut out = Vec::with_capacity(max_lag + 1);
    // Lag 0 is normalized exactly so acf(0) == 1 bit-for-bit.
    out.push(centered.iter().map(|&v| v * v).sum());
    out.extend(buf[1..=max_lag].iter().map(|c| c.re / scale));
    out
}

/// Direct O(N k) autocorrelation; the reference the FFT path is checked
/// against.
pub fn acf_reference(series: &[f64], max_lag: usize, transform: Transform) -> Result<Vec<f64>> {
    let n = series.len();
    if n < 4 || max_lag >= n / 2 {
        return Err(Error::Config("bad ACF input".into()));
    }
    let y: Vec<f64> = series.iter().map(|&x| transform.apply(x)).collect();
    let mean = y.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = y.iter().map(|&v| v - mean).collect();
    let c0: f64 = centered.iter().map(|&v| v * v).sum();
    if c0 <= 0.0 {
        return Err(Error::Degenerate("zero-variance series".into()));
    }
    Ok((0..=max_lag)
        .map(|k| {
            centered[..n - k]
                .iter()
                .zip(&centered[k..])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / c0
        })
        .collect())
}

/// A correlogram peak near a multiple of the day length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AcfPeak {
    /// Which day multiple the peak belongs to (1 = one day).
    pub multiple: usize,
    /// Lag where the local maximum sits.
    pub lag: usize,
    pub value: f64,
}

/// Local ACF maxima around each multiple of `day_length`, the periodic
/// component of the long-memory decomposition.
pub fn daily_pattern(cg: &Correlogram, day_length: usize) -> Result<Vec<AcfPeak>> {
    if day_length == 0 {
        return Err(Error::Config("day length must be positive".into()));
    }
    let max_lag = cg.acf.len() - 1;
    if max_lag < 2 * day_length {
        return Err(Error::Config(format!(
            "max lag {max_lag} must cover at least two day lengths ({})",
            2 * day_length
        )));
    }
    let halo = (day_length / 4).max(1);
    let mut peaks = Vec::new();
    let mut m = 1usize;
    while m * day_length <= max_lag {
        let center = m * day_length;
        let lo = center.saturating_sub(halo).max(1);
        let hi = (center + halo).min(max_lag);
        let (lag, value) = (lo..=hi)
            .map(|k| (k, cg.acf[k]))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        peaks.push(AcfPeak { multiple: m, lag, value });
        m += 1;
    }
    Ok(peaks)
}

/// Mean absolute return per intraday slot, averaged across days.
///
/// Ragged days are truncated to their common prefix, reported through the
/// returned warning.
pub fn intraday_volatility_profile(series: &ReturnSeries) -> Result<(Vec<f64>, Option<String>)> {
    let lens: Vec<usize> = series
        .days
        .iter()
        .map(|d| d.returns.len())
        .filter(|&l| l > 0)
        .collect();
    if lens.is_empty() {
        return Err(Error::Empty("no non-empty days".into()));
    }
    let common = *lens.iter().min().unwrap();
    let warning = if lens.iter().any(|&l| l != common) {
        Some(format!(
            "ragged day lengths; profile restricted to the common prefix of {common} slots"
        ))
    } else {
        None
    };
    let mut profile = vec![0.0_f64; common];
    let mut days = 0usize;
    for day in &series.days {
        if day.returns.is_empty() {
            continue;
        }
        for (slot, &r) in day.returns[..common].iter().enumerate() {
            profile[slot] += r.abs();
        }
        days += 1;
    }
    for v in &mut profile {
        *v /= days as f64;
    }
    Ok((profile, warning))
}
