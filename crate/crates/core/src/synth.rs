//! Synthetic processes with analytically known scaling exponents.
//!
//! These are the estimation oracles for the pipeline: i.i.d. Gaussian noise
//! pins the null `tau(q) = q/2 - 1`, fractional Gaussian noise pins the
//! monofractal line `h(q) = H`, and the binomial multiplicative cascade pins
//! the nonlinear `tau(q) = -log2(a^q + (1-a)^q)`.
//!
//! All generators draw from a ChaCha12 stream seeded explicitly; identical
//! specs produce identical bits.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};

/// Fractional Gaussian noise parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FgnSpec {
    /// Hurst exponent, strictly inside (0, 1).
    pub hurst: f64,
    /// Number of samples, at least 2.
    pub n: usize,
    /// Marginal standard deviation.
    pub sigma: f64,
    pub seed: u64,
}

impl FgnSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.hurst > 0.0 && self.hurst < 1.0) {
            return Err(Error::Config(format!(
                "hurst must lie in (0, 1), got {}",
                self.hurst
            )));
        }
        if self.n < 2 {
            return Err(Error::Config(format!("fGn length must be >= 2, got {}", self.n)));
        }
        if self.sigma <= 0.0 || !self.sigma.is_finite() {
            return Err(Error::Config(format!("sigma must be positive, got {}", self.sigma)));
        }
        Ok(())
    }
}

/// Binomial multiplicative cascade parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeSpec {
    /// Mass fraction handed to one child at each split, strictly inside (0, 1).
    pub multiplier: f64,
    /// Number of dyadic levels; the series has `2^levels` cells.
    pub levels: u32,
    pub seed: u64,
    /// When set, the (a, 1-a) order is randomized per split; the cell-mass
    /// multiset at every depth is unchanged.
    pub randomize_placement: bool,
}

/// Hard cap on cascade depth: 2^26 f64 cells is a 512 MiB buffer.
pub const MAX_CASCADE_LEVELS: u32 = 26;

impl CascadeSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.multiplier > 0.0 && self.multiplier < 1.0) {
            return Err(Error::Config(format!(
                "cascade multiplier must lie in (0, 1), got {}",
                self.multiplier
            )));
        }
        if self.levels == 0 {
            return Err(Error::Config("cascade needs at least 1 level".into()));
        }
        if self.levels > MAX_CASCADE_LEVELS {
            return Err(Error::Config(format!(
                "cascade depth {} exceeds the memory budget (max {MAX_CASCADE_LEVELS} levels)",
                self.levels
            )));
        }
        Ok(())
    }
}

/// `n` independent N(0, sigma^2) draws, deterministic in the seed.
pub fn gaussian_iid(n: usize, sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Empty("requested 0 samples".into()));
    }
    if sigma <= 0.0 || !sigma.is_finite() {
        return Err(Error::Config(format!("sigma must be positive, got {sigma}")));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
        .collect())
}

/// Autocovariance of fGn: `gamma(k) = sigma^2/2 (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H})`.
pub fn fgn_autocovariance(hurst: f64, sigma: f64, lag: usize) -> f64 {
    let two_h = 2.0 * hurst;
    let k = lag as f64;
    0.5 * sigma
        * sigma
        * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h))
}

/// Exact fractional Gaussian noise.
///
/// Uses circulant embedding (Davies-Harte): the Toeplitz covariance is
/// embedded into a circulant whose eigenvalues are the FFT of the first row.
/// For fGn the embedding is non-negative definite for every H in (0, 1), so
/// the synthesis is exact in distribution. Should the eigenvalue check ever
/// fail, the generator falls back to the exact O(n^2) recursion in
/// [`fgn_hosking`] rather than clamping the spectrum.
pub fn fgn(spec: &FgnSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    match fgn_circulant(spec) {
        Ok(series) => Ok(series),
        Err(Error::Degenerate(_)) => fgn_hosking(spec),
        Err(e) => Err(e),
    }
}

/// Davies-Harte synthesis. Errors with `Degenerate` when the embedding
/// spectrum has a materially negative eigenvalue.
pub fn fgn_circulant(spec: &FgnSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = spec.n;
    let np = n.next_power_of_two();
    let m = 2 * np;

    // First row of the circulant embedding: gamma(min(j, m - j)), unit sigma.
    let mut row: Vec<Complex<f64>> = (0..m)
        .map(|j| {
            let lag = j.min(m - j);
            Complex::new(fgn_autocovariance(spec.hurst, 1.0, lag), 0.0)
        })
        .collect();

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(m);
    fft.process(&mut row);

    let lambda: Vec<f64> = row.iter().map(|c| c.re).collect();
    let lambda_max = lambda.iter().cloned().fold(0.0_f64, f64::max);
    let tol = 1e-10 * lambda_max;
    if lambda.iter().any(|&l| l < -tol) {
        return Err(Error::Degenerate(
            "circulant embedding spectrum has negative eigenvalues".into(),
        ));
    }

    // Hermitian-symmetric Gaussian spectrum -> real sample via one FFT.
    // Draw order is fixed: the two real modes first, then (u, w) pairs.
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let mut normal = || <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
    let mut modes = vec![Complex::new(0.0, 0.0); m];
    let mf = m as f64;
    modes[0] = Complex::new((lambda[0].max(0.0) / mf).sqrt() * normal(), 0.0);
    modes[np] = Complex::new((lambda[np].max(0.0) / mf).sqrt() * normal(), 0.0);
    for k in 1..np {
        let scale = (lambda[k].max(0.0) / (2.0 * mf)).sqrt();
        let u = normal();
        let w = normal();
        modes[k] = Complex::new(scale * u, scale * w);
        modes[m - k] = Complex::new(scale * u, -scale * w);
    }
    fft.process(&mut modes);
    Ok(modes[..n].iter().map(|c| spec.sigma * c.re).collect())
}

/// Exact sequential fGn synthesis via the Durbin-Levinson recursion
/// (Hosking's method). O(n^2); used as fallback and as a cross-check oracle
/// for the circulant path.
pub fn fgn_hosking(spec: &FgnSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let n = spec.n;
    let r: Vec<f64> = (0..n).map(|k| fgn_autocovariance(spec.hurst, 1.0, k)).collect();

    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let mut normal = || <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);

    let mut x = Vec::with_capacity(n);
    x.push(normal());
    let mut phi: Vec<f64> = Vec::with_capacity(n);
    let mut variance = 1.0_f64;
    for i in 1..n {
        let mut kappa = r[i];
        for (j, &p) in phi.iter().enumerate() {
            kappa -= p * r[i - 1 - j];
        }
        kappa /= variance;
        // phi holds phi_{i-1, 1..i-1}; update in place to phi_{i, 1..i}.
        let prev = phi.clone();
        for j in 0..phi.len() {
            phi[j] = prev[j] - kappa * prev[prev.len() - 1 - j];
        }
        phi.push(kappa);
        variance *= 1.0 - kappa * kappa;
        if variance <= 0.0 {
            return Err(Error::Degenerate(
                "innovation variance collapsed in the fGn recursion".into(),
            ));
        }
        let mut mean = 0.0;
        for (j, &p) in phi.iter().enumerate() {
            mean += p * x[i - 1 - j];
        }
        x.push(mean + variance.sqrt() * normal());
    }
    for v in &mut x {
        *v *= spec.sigma;
    }
    Ok(x)
}

/// Binomial multiplicative cascade: total mass 1 split over `levels` dyadic
/// generations with fractions `(a, 1-a)`. Returns `2^levels` non-negative
/// cell masses summing to 1.
pub fn binomial_cascade(spec: &CascadeSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let a = spec.multiplier;
    let b = 1.0 - a;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let mut masses = vec![1.0_f64];
    for _ in 0..spec.levels {
        let mut next = Vec::with_capacity(masses.len() * 2);
        for &m in &masses {
            let swap = spec.randomize_placement && rng.gen::<bool>();
            if swap {
                next.push(b * m);
                next.push(a * m);
            } else {
                next.push(a * m);
                next.push(b * m);
            }
        }
        masses = next;
    }
    Ok(masses)
}

/// Closed-form scaling exponents of the binomial cascade:
/// `tau(q) = -log2(a^q + (1-a)^q)`.
///
/// Evaluated against the dominant term so large `|q|` stays finite.
pub fn cascade_tau(a: f64, q: f64) -> f64 {
    debug_assert!(a > 0.0 && a < 1.0);
    let b = 1.0 - a;
    let (hi, lo) = if (q >= 0.0) == (a >= b) { (a, b) } else { (b, a) };
    -(q * hi.log2() + (1.0 + (lo / hi).powf(q)).log2())
}

/// Analytic derivative `alpha(q) = d tau/dq` of the cascade exponents; the
/// oracle for spectrum endpoints.
pub fn cascade_alpha(a: f64, q: f64) -> f64 {
    let b = 1.0 - a;
    let aq = a.powf(q);
    let bq = b.powf(q);
    -(aq * a.ln() + bq * b.ln()) / ((aq + bq) * std::f64::consts::LN_2)
}
