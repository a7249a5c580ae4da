//! `mfdfa generate`: synthetic series with known exponents, in the returns
//! file format.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use mfdfa_core::synth::{self, CascadeSpec, FgnSpec};
use mfdfa_core::ReturnSeries;
use serde::Serialize;

use crate::manifest::RunManifest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Independent Gaussian draws (the tau(q) = q/2 - 1 null).
    Iid,
    /// Fractional Gaussian noise (monofractal, h(q) = H).
    Fgn,
    /// Binomial multiplicative cascade (tau(q) = -log2(a^q + (1-a)^q)).
    Cascade,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    /// RNG seed (mandatory: runs must be reproducible).
    #[arg(long)]
    pub seed: u64,
    /// Output returns file.
    #[arg(long)]
    pub out: PathBuf,
    /// Series length (iid, fgn).
    #[arg(long)]
    pub n: Option<usize>,
    /// Marginal standard deviation (iid, fgn).
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Hurst exponent in (0, 1) (fgn).
    #[arg(long)]
    pub hurst: Option<f64>,
    /// Cascade mass fraction in (0, 1).
    #[arg(long, default_value_t = 0.6)]
    pub multiplier: f64,
    /// Cascade depth; series length is 2^levels.
    #[arg(long)]
    pub levels: Option<u32>,
    /// Randomize the (a, 1-a) placement per split.
    #[arg(long = "randomize-placement")]
    pub randomize_placement: bool,
    /// Chop the series into synthetic days of this many returns
    /// (default: one single block).
    #[arg(long = "day-length")]
    pub day_length: Option<usize>,
}

#[derive(Serialize)]
struct GenerateEcho {
    model: Model,
    n: usize,
    sigma: Option<f64>,
    hurst: Option<f64>,
    multiplier: Option<f64>,
    levels: Option<u32>,
    randomize_placement: Option<bool>,
    day_length: usize,
}

pub fn run(args: GenerateArgs) -> Result<()> {
    let (values, echo_partial) = match args.model {
        Model::Iid => {
            let n = match args.n {
                Some(n) => n,
                None => bail!("--n is required for --model iid"),
            };
            let values = synth::gaussian_iid(n, args.sigma, args.seed)?;
            (
                values,
                GenerateEcho {
                    model: args.model,
                    n,
                    sigma: Some(args.sigma),
                    hurst: None,
                    multiplier: None,
                    levels: None,
                    randomize_placement: None,
                    day_length: 0,
                },
            )
        }
        Model::Fgn => {
            let n = match args.n {
                Some(n) => n,
                None => bail!("--n is required for --model fgn"),
            };
            let hurst = match args.hurst {
                Some(h) => h,
                None => bail!("--hurst is required for --model fgn"),
            };
            let values = synth::fgn(&FgnSpec { hurst, n, sigma: args.sigma, seed: args.seed })?;
            (
                values,
                GenerateEcho {
                    model: args.model,
                    n,
                    sigma: Some(args.sigma),
                    hurst: Some(hurst),
                    multiplier: None,
                    levels: None,
                    randomize_placement: None,
                    day_length: 0,
                },
            )
        }
        Model::Cascade => {
            let levels = match args.levels {
                Some(l) => l,
                None => bail!("--levels is required for --model cascade"),
            };
            let spec = CascadeSpec {
                multiplier: args.multiplier,
                levels,
                seed: args.seed,
                randomize_placement: args.randomize_placement,
            };
            let values = synth::binomial_cascade(&spec)?;
            let n = values.len();
            (
                values,
                GenerateEcho {
                    model: args.model,
                    n,
                    sigma: None,
                    hurst: None,
                    multiplier: Some(args.multiplier),
                    levels: Some(levels),
                    randomize_placement: Some(args.randomize_placement),
                    day_length: 0,
                },
            )
        }
    };

    let day_length = args.day_length.unwrap_or(values.len());
    if day_length == 0 {
        bail!("--day-length must be positive");
    }
    let start = chrono::NaiveDate::from_ymd_opt(2000, 1, 3).unwrap();
    let series = ReturnSeries::from_flat(&values, day_length, 1, start)?;

    let mut out = std::io::BufWriter::new(
        std::fs::File::create(&args.out)
            .with_context(|| format!("cannot create {}", args.out.display()))?,
    );
    series.write_to(&mut out)?;
    drop(out);

    let echo = GenerateEcho { day_length, ..echo_partial };
    RunManifest::new("generate", echo)
        .with_seed(args.seed)
        .with_output(&args.out)
        .write_next_to(&args.out)?;

    println!(
        "generated {} values in {} day block(s) -> {}",
        series.total_returns(),
        series.days.len(),
        args.out.display()
    );
    Ok(())
}
