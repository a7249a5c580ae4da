pub mod acf;
pub mod analyze;
pub mod generate;
pub mod ingest;
pub mod profile;
pub mod surrogate;

use std::io::BufReader;
use std::path::Path;

use anyhow::{Context, Result};
use mfdfa_core::ReturnSeries;

/// Read a day-partitioned returns file.
pub fn read_returns(path: &Path) -> Result<ReturnSeries> {
    let file = std::fs::File::open(path)
        .with_context(|| format!("cannot open returns file {}", path.display()))?;
    let series = ReturnSeries::read_from(BufReader::new(file))?;
    Ok(series)
}
