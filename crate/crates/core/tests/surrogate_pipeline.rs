//! End-to-end surrogate hypothesis tests on synthetic series.

use mfdfa_core::mfdfa::MfdfaConfig;
use mfdfa_core::surrogate::{surrogate_test, ShuffleKind, SurrogateConfig};
use mfdfa_core::synth::{self, CascadeSpec};
use mfdfa_core::ReturnSeries;

fn start_date() -> chrono::NaiveDate {
    chrono::NaiveDate::from_ymd_opt(2000, 1, 3).unwrap()
}

fn as_series(values: &[f64], day_len: usize) -> ReturnSeries {
    ReturnSeries::from_flat(values, day_len, 1, start_date()).unwrap()
}

#[test]
fn cascade_multifractality_is_destroyed_by_full_reshuffle() {
    let spec = CascadeSpec { multiplier: 0.6, levels: 16, seed: 9, randomize_placement: true };
    let masses = synth::binomial_cascade(&spec).unwrap();
    let series = as_series(&masses, masses.len());
    let outcome = surrogate_test(
        &series,
        &SurrogateConfig {
            kind: ShuffleKind::Full,
            ensemble: 100,
            seed: 3,
            mfdfa: MfdfaConfig::for_length(masses.len()).unwrap(),
        },
    )
    .unwrap();
    let report = &outcome.report;
    assert_eq!(report.failures, 0);
    assert!(
        report.p_value <= 1.0 / 101.0 + 1e-12,
        "p = {} (observed d {} vs ensemble max {})",
        report.p_value,
        report.observed_d,
        report.max
    );
    assert!(report.observed_d > report.max);
    assert_eq!(report.p_label, "< 1/101");
    assert_eq!(outcome.d_values.len(), 100);
}

#[test]
fn iid_null_is_not_rejected() {
    let n = 4096;
    let series = as_series(&synth::gaussian_iid(n, 1.0, 77).unwrap(), n);
    let outcome = surrogate_test(
        &series,
        &SurrogateConfig {
            kind: ShuffleKind::Full,
            ensemble: 100,
            seed: 8,
            mfdfa: MfdfaConfig::for_length(n).unwrap(),
        },
    )
    .unwrap();
    assert!(outcome.report.p_value > 0.05, "p = {}", outcome.report.p_value);
}

#[test]
fn identical_inputs_produce_identical_reports() {
    let n = 4096;
    let series = as_series(&synth::gaussian_iid(n, 1.0, 5).unwrap(), 512);
    let cfg = SurrogateConfig {
        kind: ShuffleKind::Intraday,
        ensemble: 100,
        seed: 21,
        mfdfa: MfdfaConfig::for_length(n).unwrap(),
    };
    let a = surrogate_test(&series, &cfg).unwrap();
    let b = surrogate_test(&series, &cfg).unwrap();
    assert_eq!(a.d_values, b.d_values);
    assert_eq!(a.report.observed_d.to_bits(), b.report.observed_d.to_bits());
    assert_eq!(a.report.p_value.to_bits(), b.report.p_value.to_bits());
    assert_eq!(a.report.mean.to_bits(), b.report.mean.to_bits());
}

#[test]
fn iid_observed_d_sits_inside_the_ensemble_bulk() {
    // Under the null the observed statistic is exchangeable with the
    // surrogates, so it lands in the central 95% most of the time.
    let n = 4096;
    let mut inside = 0;
    let reps = 10u64;
    for rep in 0..reps {
        let series = as_series(&synth::gaussian_iid(n, 1.0, 300 + rep).unwrap(), n);
        let outcome = surrogate_test(
            &series,
            &SurrogateConfig {
                kind: ShuffleKind::Full,
                ensemble: 100,
                seed: 900 + rep,
                mfdfa: MfdfaConfig::for_length(n).unwrap(),
            },
        )
        .unwrap();
        let mut sorted = outcome.d_values.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let lo = sorted[2];
        let hi = sorted[97];
        if outcome.report.observed_d >= lo && outcome.report.observed_d <= hi {
            inside += 1;
        }
    }
    assert!(inside >= 9, "observed d inside the central 95% in only {inside}/{reps} runs");
}

#[test]
fn p_value_stays_in_bounds_and_is_monotone_in_d() {
    let n = 4096;
    let series = as_series(&synth::gaussian_iid(n, 1.0, 123).unwrap(), n);
    let outcome = surrogate_test(
        &series,
        &SurrogateConfig {
            kind: ShuffleKind::Full,
            ensemble: 100,
            seed: 55,
            mfdfa: MfdfaConfig::for_length(n).unwrap(),
        },
    )
    .unwrap();
    let m = outcome.d_values.len() as f64;
    assert!(outcome.report.p_value >= 1.0 / (m + 1.0));
    assert!(outcome.report.p_value <= 1.0);
    // Monotonicity against the fixed ensemble.
    let p_at = |d_obs: f64| {
        let k = outcome.d_values.iter().filter(|&&d| d >= d_obs).count();
        (1 + k) as f64 / (m + 1.0)
    };
    let mut sorted = outcome.d_values.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut prev = f64::INFINITY;
    for &d in &sorted {
        let p = p_at(d);
        assert!(p <= prev + 1e-15);
        prev = p;
    }
}
