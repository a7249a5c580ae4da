//! Day-partitioned intraday return series and its on-disk format.
//!
//! The file format is line-oriented: an optional `# INTERVAL <seconds>`
//! header, then one `# DATE yyyy-mm-dd` header per day block followed by one
//! return per line. Values are written with Rust's shortest round-trip float
//! formatting, so a write/read cycle reproduces the exact bits.

use std::io::{BufRead, Write};

use chrono::NaiveDate;

use crate::error::{Error, Result};

/// One market day of intraday log-returns.
#[derive(Debug, Clone, PartialEq)]
pub struct DayBlock {
    pub date: NaiveDate,
    pub returns: Vec<f64>,
}

/// Ordered day blocks plus the sampling interval they were built from.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    pub days: Vec<DayBlock>,
    /// Sampling interval in seconds (1 for synthetic series).
    pub sampling_interval: u32,
}

impl ReturnSeries {
    /// Total number of returns across all day blocks.
    pub fn total_returns(&self) -> usize {
        self.days.iter().map(|d| d.returns.len()).sum()
    }

    /// Day blocks abutted into a single series, in date order.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.total_returns());
        for day in &self.days {
            out.extend_from_slice(&day.returns);
        }
        out
    }

    /// The common day length, or `None` when days are ragged or absent.
    pub fn uniform_day_len(&self) -> Option<usize> {
        let first = self.days.first()?.returns.len();
        self.days
            .iter()
            .all(|d| d.returns.len() == first)
            .then_some(first)
    }

    /// Chop a flat series into day blocks of `day_len` values (the last block
    /// keeps the remainder). Dates are synthetic, counting up from `start`.
    pub fn from_flat(values: &[f64], day_len: usize, interval: u32, start: NaiveDate) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("no values to partition".into()));
        }
        if day_len == 0 {
            return Err(Error::Config("day length must be positive".into()));
        }
        let mut days = Vec::with_capacity(values.len().div_ceil(day_len));
        for (i, chunk) in values.chunks(day_len).enumerate() {
            let date = start + chrono::Days::new(i as u64);
            days.push(DayBlock {
                date,
                returns: chunk.to_vec(),
            });
        }
        Ok(ReturnSeries {
            days,
            sampling_interval: interval,
        })
    }

    /// Write the series in the day-partitioned text format.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "# INTERVAL {}", self.sampling_interval)?;
        for day in &self.days {
            writeln!(w, "# DATE {}", day.date.format("%Y-%m-%d"))?;
            for r in &day.returns {
                writeln!(w, "{r}")?;
            }
        }
        Ok(())
    }

    /// Parse the day-partitioned text format. Values outside a `# DATE` block
    /// or non-finite values are rejected with their line number.
    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut days: Vec<DayBlock> = Vec::new();
        let mut interval: u32 = 1;
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("INTERVAL") {
                    interval = v.trim().parse().map_err(|_| Error::Parse {
                        line: lineno,
                        msg: format!("bad interval header '{trimmed}'"),
                    })?;
                } else if let Some(v) = rest.strip_prefix("DATE") {
                    let date = NaiveDate::parse_from_str(v.trim(), "%Y-%m-%d").map_err(|_| {
                        Error::Parse {
                            line: lineno,
                            msg: format!("bad date header '{trimmed}'"),
                        }
                    })?;
                    days.push(DayBlock {
                        date,
                        returns: Vec::new(),
                    });
                }
                // other comments ignored
                continue;
            }
            let value: f64 = trimmed.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad return value '{trimmed}'"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("non-finite return {value}"),
                });
            }
            match days.last_mut() {
                Some(day) => day.returns.push(value),
                None => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: "return value before any '# DATE' header".into(),
                    })
                }
            }
        }
        if days.iter().all(|d| d.returns.is_empty()) {
            return Err(Error::Empty("no returns in file".into()));
        }
        Ok(ReturnSeries {
            days,
            sampling_interval: interval,
        })
    }
}
