//! Singularity spectrum via the Legendre transform of `tau(q)`.
//!
//! `alpha_q = d tau/dq` (central differences on the q grid, one-sided at the
//! ends) and `f(alpha_q) = q alpha_q - tau(q)`. The same spectrum can be
//! rendered as the lower envelope of the line family
//! `y(alpha) = q alpha - tau(q)`.
//!
//! `tau(q)` is not pre-smoothed: regression noise shows up as a non-concavity
//! warning instead of being hidden.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mfdfa::ScalingExponents;

/// One spectrum point, ordered by the q that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub q: f64,
    pub alpha: f64,
    pub f: f64,
}

/// Spectrum geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumSummary {
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Location of the spectrum maximum (parabolic refinement over the three
    /// points nearest the maximum when available).
    pub alpha_zero: f64,
    pub width: f64,
    pub f_max: f64,
    /// `(alpha_max - alpha_zero) - (alpha_zero - alpha_min)`.
    pub asymmetry: f64,
    /// False when fewer than 3 points prevented the parabolic refinement.
    pub refined: bool,
}

/// The singularity spectrum with its summary and concavity diagnostics.
#[derive(Debug, Clone)]
pub struct SingularitySpectrum {
    pub points: Vec<SpectrumPoint>,
    pub summary: SpectrumSummary,
    /// q values where `alpha` fails to decrease: evidence of a non-concave
    /// `tau`, reported rather than smoothed away.
    pub non_concave_q: Vec<f64>,
}

impl SingularitySpectrum {
    pub fn is_concave(&self) -> bool {
        self.non_concave_q.is_empty()
    }
}

/// Legendre-transform the fitted exponents into spectrum points.
pub fn legendre_points(exponents: &ScalingExponents) -> Result<SingularitySpectrum> {
    let pairs = exponents.tau_pairs();
    let qs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let taus: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    legendre_from_tau(&qs, &taus)
}

/// Legendre transform from raw `(q, tau)` samples (at least 5, strictly
/// increasing in q).
pub fn legendre_from_tau(qs: &[f64], taus: &[f64]) -> Result<SingularitySpectrum> {
    if qs.len() != taus.len() {
        return Err(Error::Config("q and tau lengths differ".into()));
    }
    if qs.len() < 5 {
        return Err(Error::Config(format!(
            "Legendre transform needs at least 5 tau points, got {}",
            qs.len()
        )));
    }
    if qs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("q grid must be strictly increasing".into()));
    }
    if taus.iter().any(|t| !t.is_finite()) {
        return Err(Error::Config("non-finite tau values".into()));
    }

    let n = qs.len();
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let alpha = if i == 0 {
            (taus[1] - taus[0]) / (qs[1] - qs[0])
        } else if i == n - 1 {
            (taus[n - 1] - taus[n - 2]) / (qs[n - 1] - qs[n - 2])
        } else {
            (taus[i + 1] - taus[i - 1]) / (qs[i + 1] - qs[i - 1])
        };
        points.push(SpectrumPoint {
            q: qs[i],
            alpha,
            f: qs[i] * alpha - taus[i],
        });
    }

    let mut non_concave_q = Vec::new();
    for w in points.windows(2) {
        if w[1].alpha > w[0].alpha + 1e-12 {
            non_concave_q.push(w[1].q);
        }
    }

    let summary = summarize(&points)?;
    Ok(SingularitySpectrum {
        points,
        summary,
        non_concave_q,
    })
}

/// Geometry of a set of spectrum points.
pub fn summarize(points: &[SpectrumPoint]) -> Result<SpectrumSummary> {
    if points.is_empty() {
        return Err(Error::Empty("no spectrum points".into()));
    }
    let alpha_min = points.iter().map(|p| p.alpha).fold(f64::INFINITY, f64::min);
    let alpha_max = points.iter().map(|p| p.alpha).fold(f64::NEG_INFINITY, f64::max);
    let (imax, pmax) = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.f.total_cmp(&b.1.f))
        .unwrap();

    // Parabolic refinement of the maximum over the three nearest points.
    let mut alpha_zero = pmax.alpha;
    let mut refined = false;
    if points.len() >= 3 {
        let i = imax.clamp(1, points.len() - 2);
        let (a, b, c) = (&points[i - 1], &points[i], &points[i + 1]);
        // Vertex of the parabola through (alpha, f) triples; falls back to
        // the raw argmax when the geometry is degenerate (collapsed alphas).
        let d1 = (b.f - a.f) / (b.alpha - a.alpha);
        let d2 = (c.f - b.f) / (c.alpha - b.alpha);
        let curv = (d2 - d1) / (c.alpha - a.alpha);
        if d1.is_finite() && d2.is_finite() && curv.is_finite() && curv < 0.0 {
            let vertex = 0.5 * (a.alpha + b.alpha) - d1 / (2.0 * curv);
            if vertex.is_finite() && vertex >= alpha_min && vertex <= alpha_max {
                alpha_zero = vertex;
                refined = true;
            }
        }
    }

    Ok(SpectrumSummary {
        alpha_min,
        alpha_max,
        alpha_zero,
        width: alpha_max - alpha_min,
        f_max: pmax.f,
        asymmetry: (alpha_max - alpha_zero) - (alpha_zero - alpha_min),
        refined,
    })
}

/// Lower envelope `y(alpha) = min_q (q alpha - tau(q))` sampled at the given
/// abscissae.
pub fn envelope(tau_pairs: &[(f64, f64)], alpha_samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    if tau_pairs.is_empty() {
        return Err(Error::Empty("no tau points for the envelope".into()));
    }
    Ok(alpha_samples
        .iter()
        .map(|&alpha| {
            let y = tau_pairs
                .iter()
                .map(|&(q, tau)| q * alpha - tau)
                .fold(f64::INFINITY, f64::min)
                ;
            (alpha, y)
        })
        .collect())
}

/// Evenly spaced envelope abscissae spanning the spectrum range padded by
/// `pad` on both sides.
pub fn envelope_samples(summary: &SpectrumSummary, pad: f64, count: usize) -> Vec<f64> {
    let lo = summary.alpha_min - pad;
    let hi = summary.alpha_max + pad;
    if count < 2 {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}
