//! Multifractal detrended fluctuation analysis.
//!
//! The estimator follows the standard recipe: build the mean-centered
//! cumulative profile, split it into `2 N_s` windows of length `s` (from both
//! ends), remove an order-`m` least-squares polynomial per window, and form
//! the q-power mean of the residual RMS values,
//!
//! ```text
//! F_q(s) = ( (1/K) sum_v [F^2(v, s)]^(q/2) )^(1/q)
//! F_0(s) = exp( (1/(2K)) sum_v ln F^2(v, s) )
//! ```
//!
//! `h(q)` is the slope of `ln F_q(s)` on `ln s`, and `tau(q) = q h(q) - 1`.
//!
//! Polynomial fits use an orthonormal basis on a centered abscissa mapped to
//! `[-1, 1]`; raw Vandermonde systems on window indices are unusable at order
//! 5 and window lengths in the 10^4..10^5 range.
//!
//! [`partition_tau`] provides the classical dyadic partition-function
//! estimate of `tau(q)` as an independent cross-check; it is exact on
//! binomial cascades and is not meant for production estimation.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Fewest (scale, F) pairs a per-q regression may use.
pub const MIN_FIT_SCALES: usize = 5;

const Q_ZERO_EPS: f64 = 1e-8;

/// Estimator configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct MfdfaConfig {
    /// Moment orders, strictly increasing, must contain q = 2.
    pub q_grid: Vec<f64>,
    /// Window sizes, strictly increasing, within `[poly_order + 2, N/4]`.
    pub scales: Vec<usize>,
    /// Detrending polynomial order.
    pub poly_order: usize,
    /// Segment from both ends (2 N_s windows) instead of the front only.
    pub both_ends: bool,
    /// Optional inclusive scale range for the log-log fit; `None` uses every scale.
    pub fit_range: Option<(usize, usize)>,
}

impl MfdfaConfig {
    /// The default moment grid: q from -5 to 5 in steps of 0.25.
    pub fn default_q_grid() -> Vec<f64> {
        (0..=40).map(|i| (i as f64 - 20.0) * 0.25).collect()
    }

    /// 30 log-spaced window sizes in `[16, n/4]`.
    pub fn default_scales(n: usize) -> Result<Vec<usize>> {
        if n < 64 {
            return Err(Error::Config(format!(
                "series of length {n} is too short for the default scale grid (need >= 64)"
            )));
        }
        log_spaced_scales(16, n / 4, 30)
    }

    /// Default configuration (order-5 detrending, both ends) for a series of
    /// length `n`.
    pub fn for_length(n: usize) -> Result<Self> {
        Ok(MfdfaConfig {
            q_grid: Self::default_q_grid(),
            scales: Self::default_scales(n)?,
            poly_order: 5,
            both_ends: true,
            fit_range: None,
        })
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.q_grid.is_empty() {
            return Err(Error::Config("empty q grid".into()));
        }
        if self.q_grid.iter().any(|q| !q.is_finite()) {
            return Err(Error::Config("non-finite q in grid".into()));
        }
        if self.q_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("q grid must be strictly increasing".into()));
        }
        if !self.q_grid.iter().any(|&q| (q - 2.0).abs() < 1e-9) {
            return Err(Error::Config("q grid must include q = 2".into()));
        }
        if self.scales.is_empty() {
            return Err(Error::Config("empty scale grid".into()));
        }
        if self.scales.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("scale grid must be strictly increasing".into()));
        }
        let smin = self.scales[0];
        let smax = *self.scales.last().unwrap();
        if smin < self.poly_order + 2 {
            return Err(Error::Config(format!(
                "minimum scale {smin} must be at least poly_order + 2 = {}",
                self.poly_order + 2
            )));
        }
        if smin < 4 {
            return Err(Error::Config(format!("minimum scale {smin} must be at least 4")));
        }
        if smax > n / 4 {
            return Err(Error::Config(format!(
                "maximum scale {smax} exceeds N/4 = {} for series length {n}",
                n / 4
            )));
        }
        let (lo, hi) = self.fit_range.unwrap_or((smin, smax));
        if lo > hi {
            return Err(Error::Config(format!("fit range {lo}..{hi} is inverted")));
        }
        let in_range = self.scales.iter().filter(|&&s| s >= lo && s <= hi).count();
        if in_range < MIN_FIT_SCALES {
            return Err(Error::Config(format!(
                "fit range {lo}..{hi} covers only {in_range} scales (need >= {MIN_FIT_SCALES})"
            )));
        }
        Ok(())
    }
}

/// Geometric progression of window sizes, rounded and deduplicated.
pub fn log_spaced_scales(lo: usize, hi: usize, count: usize) -> Result<Vec<usize>> {
    if lo < 2 || hi < lo {
        return Err(Error::Config(format!("bad scale bounds {lo}..{hi}")));
    }
    if count < 2 || lo == hi {
        return Ok(vec![lo]);
    }
    let (llo, lhi) = ((lo as f64).ln(), (hi as f64).ln());
    let mut scales: Vec<usize> = (0..count)
        .map(|i| {
            let t = i as f64 / (count - 1) as f64;
            (llo + t * (lhi - llo)).exp().round() as usize
        })
        .collect();
    scales.dedup();
    Ok(scales)
}

/// Mean-centered cumulative profile `Y(i) = sum_{k<=i} (x_k - mean)`.
///
/// Compensated summation keeps the telescoping residual `Y(N)` at the
/// rounding floor even for million-point series.
pub fn profile(series: &[f64]) -> Result<Vec<f64>> {
    if series.len() < 4 {
        return Err(Error::Config(format!(
            "series of length {} is too short for a profile (need >= 4)",
            series.len()
        )));
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config("series contains non-finite values".into()));
    }
    let (min, max) = series
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if min == max {
        return Err(Error::Degenerate(
            "constant series has an identically zero profile".into(),
        ));
    }
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let mut out = Vec::with_capacity(series.len());
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for &x in series {
        let term = (x - mean) - comp;
        let next = sum + term;
        comp = (next - sum) - term;
        sum = next;
        out.push(sum);
    }
    Ok(out)
}

/// Non-overlapping index windows of length `s`: `floor(N/s)` from the front,
/// plus the same number from the back when `both_ends` is set.
pub fn segment(n: usize, s: usize, both_ends: bool) -> Result<Vec<(usize, usize)>> {
    if s > n {
        return Err(Error::Config(format!("window {s} exceeds series length {n}")));
    }
    if s < 4 {
        return Err(Error::Config(format!("window {s} is below the minimum of 4")));
    }
    let k = n / s;
    let mut windows = Vec::with_capacity(if both_ends { 2 * k } else { k });
    for i in 0..k {
        windows.push((i * s, (i + 1) * s));
    }
    if both_ends {
        for j in 0..k {
            windows.push((n - (j + 1) * s, n - j * s));
        }
    }
    Ok(windows)
}

/// Reusable order-`m` detrender for windows of a fixed length.
///
/// Holds an orthonormal polynomial basis over the abscissa `0..len` mapped to
/// `[-1, 1]`, so each window costs two passes of dot products and the
/// residual is formed explicitly (no cancellation through norm identities).
pub struct DetrendPlan {
    basis: Vec<Vec<f64>>,
    len: usize,
}

impl DetrendPlan {
    pub fn new(len: usize, order: usize) -> Result<Self> {
        if len < order + 2 {
            return Err(Error::Config(format!(
                "window length {len} cannot support an order-{order} fit"
            )));
        }
        let denom = (len - 1) as f64;
        let x: Vec<f64> = (0..len).map(|i| 2.0 * i as f64 / denom - 1.0).collect();
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
        for j in 0..=order {
            let mut v: Vec<f64> = x.iter().map(|&xi| xi.powi(j as i32)).collect();
            // Modified Gram-Schmidt, applied twice.
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &v);
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= c * bi;
                    }
                }
            }
            let norm = dot(&v, &v).sqrt();
            assert!(
                norm > 0.0,
                "polynomial design became rank-deficient (len {len}, order {order})"
            );
            for vi in &mut v {
                *vi /= norm;
            }
            basis.push(v);
        }
        Ok(DetrendPlan { basis, len })
    }

    pub fn window_len(&self) -> usize {
        self.len
    }

    /// Mean square of the residual after removing the polynomial component.
    pub fn residual_mean_square(&self, window: &[f64]) -> f64 {
        let mut scratch = vec![0.0; self.len];
        self.residual_mean_square_with(window, &mut scratch)
    }

    fn residual_mean_square_with(&self, window: &[f64], scratch: &mut [f64]) -> f64 {
        debug_assert_eq!(window.len(), self.len);
        scratch.copy_from_slice(window);
        for b in &self.basis {
            let c = dot(b, scratch);
            for (ri, bi) in scratch.iter_mut().zip(b) {
                *ri -= c * bi;
            }
        }
        dot(scratch, scratch) / self.len as f64
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Root-mean-square of the detrending residual for one window; the
/// `F(v, s)` of the method.
pub fn segment_rms(window: &[f64], order: usize) -> Result<f64> {
    let plan = DetrendPlan::new(window.len(), order)?;
    Ok(plan.residual_mean_square(window).sqrt())
}

/// `F_q(s)` over the configured grid with per-cell segment counts.
#[derive(Debug, Clone)]
pub struct FluctuationSurface {
    pub q_grid: Vec<f64>,
    pub scales: Vec<usize>,
    /// `values[qi][si]`.
    pub values: Vec<Vec<f64>>,
    /// Segments entering the mean at `(q, s)`; zero-RMS windows are excluded
    /// for q <= 0.
    pub segments_used: Vec<Vec<usize>>,
}

impl FluctuationSurface {
    pub fn value(&self, qi: usize, si: usize) -> f64 {
        self.values[qi][si]
    }
}

/// Compute the fluctuation surface of a profile.
///
/// Scales are independent tasks; segment RMS values at a scale are computed
/// once and shared across all q, so the output does not depend on scheduling.
pub fn fluctuation(profile: &[f64], config: &MfdfaConfig) -> Result<FluctuationSurface> {
    config.validate(profile.len())?;
    let columns: Vec<Result<(Vec<f64>, Vec<usize>)>> = config
        .scales
        .par_iter()
        .map(|&s| scale_column(profile, s, config))
        .collect();

    let nq = config.q_grid.len();
    let mut values = vec![vec![0.0; config.scales.len()]; nq];
    let mut used = vec![vec![0usize; config.scales.len()]; nq];
    for (si, column) in columns.into_iter().enumerate() {
        let (col_values, col_used) = column?;
        for qi in 0..nq {
            values[qi][si] = col_values[qi];
            used[qi][si] = col_used[qi];
        }
    }
    Ok(FluctuationSurface {
        q_grid: config.q_grid.clone(),
        scales: config.scales.clone(),
        values,
        segments_used: used,
    })
}

fn scale_column(profile: &[f64], s: usize, config: &MfdfaConfig) -> Result<(Vec<f64>, Vec<usize>)> {
    let plan = DetrendPlan::new(s, config.poly_order)?;
    let windows = segment(profile.len(), s, config.both_ends)?;
    let mut scratch = vec![0.0; s];
    let rms2: Vec<f64> = windows
        .iter()
        .map(|&(lo, hi)| plan.residual_mean_square_with(&profile[lo..hi], &mut scratch))
        .collect();
    if rms2.iter().all(|&v| v == 0.0) {
        return Err(Error::Degenerate(format!(
            "all segments have zero fluctuation at scale {s}"
        )));
    }
    let mut col_values = Vec::with_capacity(config.q_grid.len());
    let mut col_used = Vec::with_capacity(config.q_grid.len());
    for &q in &config.q_grid {
        let (f, k) = q_power_mean(&rms2, q);
        col_values.push(f);
        col_used.push(k);
    }
    Ok((col_values, col_used))
}

/// The q-power mean of segment RMS values, given their squares.
/// Returns the mean and the number of segments used.
fn q_power_mean(rms2: &[f64], q: f64) -> (f64, usize) {
    if q.abs() < Q_ZERO_EPS {
        let mut sum = 0.0;
        let mut k = 0usize;
        for &v in rms2 {
            if v > 0.0 {
                sum += v.ln();
                k += 1;
            }
        }
        ((sum / (2.0 * k as f64)).exp(), k)
    } else if q > 0.0 {
        let k = rms2.len();
        let sum: f64 = rms2.iter().map(|&v| v.powf(q / 2.0)).sum();
        ((sum / k as f64).powf(1.0 / q), k)
    } else {
        let mut sum = 0.0;
        let mut k = 0usize;
        for &v in rms2 {
            if v > 0.0 {
                sum += v.powf(q / 2.0);
                k += 1;
            }
        }
        ((sum / k as f64).powf(1.0 / q), k)
    }
}

/// One per-q regression of `ln F_q(s)` on `ln s`.
#[derive(Debug, Clone, PartialEq)]
pub struct QFit {
    pub q: f64,
    /// Generalized Hurst exponent (slope).
    pub h: f64,
    pub h_stderr: f64,
    /// `tau(q) = q h(q) - 1`.
    pub tau: f64,
    pub r2: f64,
    /// Regression intercept, `ln` scale; absorbs the scaling prefactor.
    pub intercept: f64,
    pub scales_used: usize,
}

/// Fitted exponents over the q grid plus the scale range actually used.
#[derive(Debug, Clone)]
pub struct ScalingExponents {
    pub fits: Vec<QFit>,
    /// q values whose regression had fewer than [`MIN_FIT_SCALES`] usable points.
    pub failed: Vec<f64>,
    pub fit_scale_lo: usize,
    pub fit_scale_hi: usize,
}

impl ScalingExponents {
    pub fn tau_pairs(&self) -> Vec<(f64, f64)> {
        self.fits.iter().map(|f| (f.q, f.tau)).collect()
    }

    pub fn h_at(&self, q: f64) -> Option<f64> {
        self.fits.iter().find(|f| (f.q - q).abs() < 1e-9).map(|f| f.h)
    }

    pub fn tau_at(&self, q: f64) -> Option<f64> {
        self.fits.iter().find(|f| (f.q - q).abs() < 1e-9).map(|f| f.tau)
    }
}

/// Fit `h(q)` per q over the (optionally restricted) scale range.
pub fn fit_h(surface: &FluctuationSurface, fit_range: Option<(usize, usize)>) -> Result<ScalingExponents> {
    let smin = *surface.scales.first().ok_or_else(|| Error::Config("empty surface".into()))?;
    let smax = *surface.scales.last().unwrap();
    let (lo, hi) = fit_range.unwrap_or((smin, smax));
    let selected: Vec<usize> = surface
        .scales
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= lo && s <= hi)
        .map(|(i, _)| i)
        .collect();
    if selected.len() < MIN_FIT_SCALES {
        return Err(Error::Config(format!(
            "fit range {lo}..{hi} covers only {} scales (need >= {MIN_FIT_SCALES})",
            selected.len()
        )));
    }

    let mut fits = Vec::with_capacity(surface.q_grid.len());
    let mut failed = Vec::new();
    for (qi, &q) in surface.q_grid.iter().enumerate() {
        let mut xs = Vec::with_capacity(selected.len());
        let mut ys = Vec::with_capacity(selected.len());
        for &si in &selected {
            let f = surface.values[qi][si];
            if f.is_finite() && f > 0.0 {
                xs.push((surface.scales[si] as f64).ln());
                ys.push(f.ln());
            }
        }
        if xs.len() < MIN_FIT_SCALES {
            failed.push(q);
            continue;
        }
        let fit = fit_line(&xs, &ys).ok_or_else(|| {
            Error::Degenerate(format!("log-log regression degenerate at q = {q}"))
        })?;
        fits.push(QFit {
            q,
            h: fit.slope,
            h_stderr: fit.slope_stderr,
            tau: q * fit.slope - 1.0,
            r2: fit.r2,
            intercept: fit.intercept,
            scales_used: xs.len(),
        });
    }
    if fits.is_empty() {
        return Err(Error::Degenerate("every per-q fit failed".into()));
    }
    Ok(ScalingExponents {
        fits,
        failed,
        fit_scale_lo: lo,
        fit_scale_hi: hi,
    })
}

/// Profile, fluctuation surface, and exponent fits in one call.
pub fn analyze(series: &[f64], config: &MfdfaConfig) -> Result<(FluctuationSurface, ScalingExponents)> {
    let prof = profile(series)?;
    let surface = fluctuation(&prof, config)?;
    let exponents = fit_h(&surface, config.fit_range)?;
    Ok((surface, exponents))
}

pub(crate) struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r2: f64,
}

/// Ordinary least squares with slope standard error and R^2.
pub(crate) fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let nf = n as f64;
    let xm = x.iter().sum::<f64>() / nf;
    let ym = y.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - xm;
        let dy = yi - ym;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let ssr = (syy - slope * sxy).max(0.0);
    let slope_stderr = if n > 2 { (ssr / (nf - 2.0) / sxx).sqrt() } else { f64::NAN };
    let r2 = if syy > 0.0 { 1.0 - ssr / syy } else { 1.0 };
    Some(LineFit { slope, intercept, slope_stderr, r2 })
}

/// How [`partition_tau`] treats series whose length is not a power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthPolicy {
    /// Reject the input.
    Strict,
    /// Keep the longest power-of-two prefix.
    TrimToPowerOfTwo,
}

/// Partition-function estimate of `tau(q)`.
#[derive(Debug, Clone)]
pub struct PartitionEstimate {
    pub q_grid: Vec<f64>,
    pub tau: Vec<f64>,
    pub r2: Vec<f64>,
    /// Dyadic depths used: depth d means 2^d boxes.
    pub depths: Vec<u32>,
    /// Zero-sum boxes excluded per q (summed over depths).
    pub excluded_boxes: Vec<usize>,
}

/// Dyadic partition-function estimator: `Z_q(eps) = sum |S(n eps; eps)|^q`
/// over boxes of size `eps = 2^-d`, with `tau(q)` the log-log slope.
///
/// Box sums are built by pairwise aggregation from the finest level, so on a
/// multiplicative cascade every box mass is reproduced exactly. Cross-check
/// tool; not a production estimator.
pub fn partition_tau(
    series: &[f64],
    q_grid: &[f64],
    depths: Option<&[u32]>,
    policy: LengthPolicy,
) -> Result<PartitionEstimate> {
    if series.len() < 4 {
        return Err(Error::Config("partition estimator needs at least 4 points".into()));
    }
    if series.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config("series contains non-finite values".into()));
    }
    let len = match policy {
        LengthPolicy::Strict => {
            if !series.len().is_power_of_two() {
                return Err(Error::Config(format!(
                    "length {} is not a power of two (policy Strict)",
                    series.len()
                )));
            }
            series.len()
        }
        LengthPolicy::TrimToPowerOfTwo => {
            let p = usize::BITS - 1 - series.len().leading_zeros();
            1usize << p
        }
    };
    let series = &series[..len];
    let max_depth = len.trailing_zeros();

    let depths: Vec<u32> = match depths {
        Some(d) => {
            let mut d = d.to_vec();
            d.sort_unstable();
            d.dedup();
            if d.iter().any(|&x| x == 0 || x > max_depth) {
                return Err(Error::Config(format!(
                    "depths must lie in 1..={max_depth} for length {len}"
                )));
            }
            d
        }
        None => (1..=max_depth).collect(),
    };
    if depths.len() < 2 {
        return Err(Error::Config("need at least 2 depths for a slope".into()));
    }

    // Pairwise aggregation: level d has 2^d box sums.
    let mut levels: Vec<Vec<f64>> = Vec::with_capacity(max_depth as usize + 1);
    levels.push(series.to_vec());
    while levels.last().unwrap().len() > 1 {
        let prev = levels.last().unwrap();
        let next: Vec<f64> = prev.chunks_exact(2).map(|p| p[0] + p[1]).collect();
        levels.push(next);
    }
    levels.reverse(); // levels[d] now has 2^d entries

    let ln2 = std::f64::consts::LN_2;
    let mut tau = Vec::with_capacity(q_grid.len());
    let mut r2 = Vec::with_capacity(q_grid.len());
    let mut excluded = Vec::with_capacity(q_grid.len());
    for &q in q_grid {
        let mut xs = Vec::with_capacity(depths.len());
        let mut ys = Vec::with_capacity(depths.len());
        let mut skipped = 0usize;
        for &d in &depths {
            let boxes = &levels[d as usize];
            let mut z = 0.0_f64;
            let mut used = 0usize;
            for &s in boxes {
                let a = s.abs();
                if a == 0.0 {
                    if q > 0.0 {
                        used += 1; // contributes 0 to the sum
                    } else {
                        skipped += 1;
                    }
                    continue;
                }
                z += if q.abs() < Q_ZERO_EPS { 1.0 } else { a.powf(q) };
                used += 1;
            }
            if used == 0 || z <= 0.0 || !z.is_finite() {
                continue;
            }
            xs.push(-(d as f64) * ln2); // ln eps
            ys.push(z.ln());
        }
        if xs.len() < 2 {
            return Err(Error::Degenerate(format!(
                "partition function degenerate at q = {q}"
            )));
        }
        let fit = fit_line(&xs, &ys)
            .ok_or_else(|| Error::Degenerate(format!("partition fit degenerate at q = {q}")))?;
        tau.push(fit.slope);
        r2.push(fit.r2);
        excluded.push(skipped);
    }
    Ok(PartitionEstimate {
        q_grid: q_grid.to_vec(),
        tau,
        r2,
        depths,
        excluded_boxes: excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_hand_values() {
        assert_eq!(profile(&[1.0, -1.0, 1.0, -1.0]).unwrap(), vec![1.0, 0.0, 1.0, 0.0]);
        // (1, 2, 3) has mean 2 -> profile (-1, -1, 0); padding with another 2
        // keeps the mean and meets the 4-point minimum.
        let y = profile(&[1.0, 2.0, 3.0, 2.0]).unwrap();
        assert_eq!(y, vec![-1.0, -1.0, 0.0, 0.0]);
    }

    #[test]
    fn profile_ends_at_zero() {
        let series: Vec<f64> = (0..10_000).map(|i| ((i * 2654435761usize) % 1000) as f64 / 999.0).collect();
        let y = profile(&series).unwrap();
        let scale = y.iter().fold(0.0_f64, |m, &v| m.max(v.abs())).max(1.0);
        assert!(y.last().unwrap().abs() / scale < 1e-9);
    }

    #[test]
    fn profile_rejects_constant_and_short_series() {
        assert!(matches!(profile(&[2.0; 64]), Err(Error::Degenerate(_))));
        assert!(profile(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn segment_counts() {
        assert_eq!(segment(1000, 300, true).unwrap().len(), 6);
        assert_eq!(segment(1000, 250, true).unwrap().len(), 8);
        assert_eq!(segment(1000, 300, false).unwrap().len(), 3);
        assert!(segment(10, 11, true).is_err());
    }

    #[test]
    fn segment_exact_division_covers_identically_from_both_ends() {
        let windows = segment(1000, 250, true).unwrap();
        let forward: std::collections::BTreeSet<_> = windows[..4].iter().cloned().collect();
        let backward: std::collections::BTreeSet<_> = windows[4..].iter().cloned().collect();
        assert_eq!(forward, backward);
        assert!(windows.iter().all(|&(lo, hi)| hi - lo == 250 && hi <= 1000));
    }

    #[test]
    fn detrend_annihilates_polynomials() {
        // Exactly linear window, any order >= 1 -> residual 0.
        let w: Vec<f64> = (0..100).map(|i| 3.0 + 0.5 * i as f64).collect();
        assert!(segment_rms(&w, 1).unwrap() < 1e-9);
        assert!(segment_rms(&w, 5).unwrap() < 1e-9);
        // Exactly quintic window, order 5 -> residual ~0.
        let w: Vec<f64> = (0..200)
            .map(|i| {
                let t = i as f64 / 199.0;
                1.0 - 2.0 * t + 3.0 * t.powi(2) - 4.0 * t.powi(3) + 5.0 * t.powi(4) - 6.0 * t.powi(5)
            })
            .collect();
        assert!(segment_rms(&w, 5).unwrap() < 1e-7);
    }

    /// Independent oracle: normal equations on the same normalized abscissa,
    /// solved by Gaussian elimination with partial pivoting.
    #[allow(clippy::needless_range_loop)]
    fn normal_equations_rms(window: &[f64], order: usize) -> f64 {
        let n = window.len();
        let denom = (n - 1) as f64;
        let x: Vec<f64> = (0..n).map(|i| 2.0 * i as f64 / denom - 1.0).collect();
        let m = order + 1;
        let mut ata = vec![vec![0.0_f64; m]; m];
        let mut atb = vec![0.0_f64; m];
        for i in 0..n {
            let mut powers = vec![1.0_f64; m];
            for j in 1..m {
                powers[j] = powers[j - 1] * x[i];
            }
            for r in 0..m {
                atb[r] += powers[r] * window[i];
                for c in 0..m {
                    ata[r][c] += powers[r] * powers[c];
                }
            }
        }
        // Gaussian elimination with partial pivoting.
        for col in 0..m {
            let pivot = (col..m).max_by(|&a, &b| ata[a][col].abs().total_cmp(&ata[b][col].abs())).unwrap();
            ata.swap(col, pivot);
            atb.swap(col, pivot);
            for row in col + 1..m {
                let f = ata[row][col] / ata[col][col];
                for c in col..m {
                    ata[row][c] -= f * ata[col][c];
                }
                atb[row] -= f * atb[col];
            }
        }
        let mut coef = vec![0.0_f64; m];
        for row in (0..m).rev() {
            let mut v = atb[row];
            for c in row + 1..m {
                v -= ata[row][c] * coef[c];
            }
            coef[row] = v / ata[row][row];
        }
        let mut ss = 0.0;
        for i in 0..n {
            let mut fit = 0.0;
            let mut p = 1.0;
            for &c in &coef {
                fit += c * p;
                p *= x[i];
            }
            let r = window[i] - fit;
            ss += r * r;
        }
        (ss / n as f64).sqrt()
    }

    #[test]
    fn detrend_matches_normal_equations_oracle() {
        // Deterministic pseudo-random 64-point window.
        let mut state = 0x9E3779B97F4A7C15_u64;
        let w: Vec<f64> = (0..64)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        let ours = segment_rms(&w, 2).unwrap();
        let oracle = normal_equations_rms(&w, 2);
        assert!(
            (ours - oracle).abs() / oracle < 1e-8,
            "ours {ours} vs oracle {oracle}"
        );
    }

    #[test]
    fn detrend_invariance_under_added_polynomial_trend() {
        let mut state = 12345_u64;
        let base: Vec<f64> = (0..512)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                (state >> 11) as f64 / (1u64 << 53) as f64
            })
            .collect();
        let trended: Vec<f64> = base
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let t = i as f64 / 511.0;
                v + 40.0 * t.powi(5) - 13.0 * t.powi(3) + 7.0 * t - 2.0
            })
            .collect();
        for s in [16usize, 64, 128] {
            let plan = DetrendPlan::new(s, 5).unwrap();
            for (w1, w2) in base.chunks_exact(s).zip(trended.chunks_exact(s)) {
                let a = plan.residual_mean_square(w1).sqrt();
                let b = plan.residual_mean_square(w2).sqrt();
                assert!((a - b).abs() <= 1e-8 * a.max(1.0), "s={s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn q_power_mean_hand_values() {
        // Two segments with RMS 1 and 2 (squares 1 and 4).
        let rms2 = [1.0, 4.0];
        let (f2, k2) = q_power_mean(&rms2, 2.0);
        assert!((f2 - (2.5_f64).sqrt()).abs() < 1e-12);
        assert_eq!(k2, 2);
        let (f0, k0) = q_power_mean(&rms2, 0.0);
        assert!((f0 - 2.0_f64.sqrt()).abs() < 1e-12);
        assert_eq!(k0, 2);
        // Constant RMS c across segments -> F_q = c for every q.
        let c2 = [2.25, 2.25, 2.25];
        for q in [-5.0, -1.0, 0.0, 0.5, 3.0] {
            let (f, _) = q_power_mean(&c2, q);
            assert!((f - 1.5).abs() < 1e-12, "q={q}: {f}");
        }
    }

    #[test]
    fn q_power_mean_is_monotone_in_q() {
        let rms2 = [0.1, 0.5, 1.0, 2.0, 9.0];
        let qs: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.5).collect();
        let vals: Vec<f64> = qs.iter().map(|&q| q_power_mean(&rms2, q).0).collect();
        for w in vals.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "not monotone: {w:?}");
        }
    }

    #[test]
    fn q_power_mean_excludes_zero_segments_below_zero() {
        let rms2 = [0.0, 1.0, 4.0];
        let (f_neg, k_neg) = q_power_mean(&rms2, -2.0);
        assert_eq!(k_neg, 2);
        assert!(f_neg.is_finite() && f_neg > 0.0);
        let (_, k_zero) = q_power_mean(&rms2, 0.0);
        assert_eq!(k_zero, 2);
        let (f_pos, k_pos) = q_power_mean(&rms2, 2.0);
        assert_eq!(k_pos, 3);
        assert!((f_pos - (5.0_f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn fit_recovers_exact_power_law() {
        let scales: Vec<usize> = vec![16, 23, 32, 45, 64, 91, 128];
        let q_grid = vec![-2.0, 0.0, 2.0];
        let values: Vec<Vec<f64>> = q_grid.iter().map(|_| scales.iter().map(|&s| s as f64).collect()).collect();
        let used = vec![vec![10usize; scales.len()]; q_grid.len()];
        let surface = FluctuationSurface { q_grid: q_grid.clone(), scales, values, segments_used: used };
        let exps = fit_h(&surface, None).unwrap();
        for fit in &exps.fits {
            assert!((fit.h - 1.0).abs() < 1e-12);
            assert!((fit.tau - (fit.q - 1.0)).abs() < 1e-12);
            assert!((fit.r2 - 1.0).abs() < 1e-12);
            // tau = q h - 1 holds identically.
            assert_eq!(fit.tau, fit.q * fit.h - 1.0);
        }
        assert!(exps.failed.is_empty());
    }

    #[test]
    fn config_validation_catches_bad_grids() {
        let n = 4096;
        let mut cfg = MfdfaConfig::for_length(n).unwrap();
        assert!(cfg.validate(n).is_ok());

        let mut bad = cfg.clone();
        bad.q_grid = vec![0.0, 1.0, 1.0];
        assert!(bad.validate(n).is_err());

        let mut bad = cfg.clone();
        bad.q_grid = vec![-1.0, 0.0, 1.0]; // missing q = 2
        assert!(bad.validate(n).is_err());

        let mut bad = cfg.clone();
        bad.scales.insert(0, 5); // below poly_order + 2 = 7
        assert!(bad.validate(n).is_err());

        let mut bad = cfg.clone();
        bad.scales.push(n / 2); // above N/4
        assert!(bad.validate(n).is_err());

        cfg.fit_range = Some((4096, 16)); // inverted
        assert!(cfg.validate(n).is_err());
    }

    #[test]
    fn partition_tau_is_exact_on_uniform_cascade() {
        // a = 0.5 cascade: all boxes at depth d hold 2^-d, so tau(q) = q - 1
        // exactly at every depth.
        let series = vec![1.0 / 1024.0; 1024];
        let q_grid = vec![-3.0, -1.0, 0.0, 1.0, 2.0, 4.0];
        let est = partition_tau(&series, &q_grid, None, LengthPolicy::Strict).unwrap();
        for (i, &q) in q_grid.iter().enumerate() {
            assert!((est.tau[i] - (q - 1.0)).abs() < 1e-9, "q={q}: {}", est.tau[i]);
        }
    }

    #[test]
    fn partition_tau_zero_at_q_zero_for_any_series() {
        let series: Vec<f64> = (0..512).map(|i| (i as f64 * 0.7).sin() + 2.0).collect();
        let est = partition_tau(&series, &[0.0, 2.0], None, LengthPolicy::Strict).unwrap();
        assert!((est.tau[0] + 1.0).abs() < 1e-9, "tau(0) = {}", est.tau[0]);
    }

    #[test]
    fn partition_tau_length_policy() {
        let series: Vec<f64> = (0..100).map(|i| i as f64 + 1.0).collect();
        assert!(partition_tau(&series, &[0.0, 2.0], None, LengthPolicy::Strict).is_err());
        let est = partition_tau(&series, &[0.0, 2.0], None, LengthPolicy::TrimToPowerOfTwo).unwrap();
        assert_eq!(est.depths.last().copied(), Some(6)); // trimmed to 64
    }
}
