//! Tick ingestion: parse, filter to the trading session, resample onto a
//! fixed clock grid, and form day-partitioned intraday log-returns.
//!
//! Resampling is last-observation-carried-forward on a grid anchored at the
//! session open, so no price ever looks ahead. Ticks in the final
//! `close_cutoff` seconds before the nominal close are dropped (closing-time
//! uncertainty), and overnight return pairs are never formed.

use std::io::BufRead;

use chrono::{NaiveDate, NaiveDateTime, NaiveTime, Timelike};

use crate::error::{Error, Result};
use crate::returns::{DayBlock, ReturnSeries};

/// One observed price at a timestamp (exchange-local clock).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tick {
    pub timestamp: NaiveDateTime,
    pub price: f64,
}

/// Trading-session window and the closing trim.
#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub open: NaiveTime,
    pub close: NaiveTime,
    /// Ticks strictly after `close - close_cutoff_secs` are dropped.
    pub close_cutoff_secs: u32,
}

impl Default for Session {
    fn default() -> Self {
        Session {
            open: NaiveTime::from_hms_opt(9, 0, 0).unwrap(),
            close: NaiveTime::from_hms_opt(17, 30, 0).unwrap(),
            close_cutoff_secs: 30,
        }
    }
}

impl Session {
    pub fn validate(&self) -> Result<()> {
        if self.open >= self.close {
            return Err(Error::Config(format!(
                "session open {} must precede close {}",
                self.open, self.close
            )));
        }
        if self.close_cutoff_secs as i64 >= self.length_secs() {
            return Err(Error::Config(format!(
                "closing cutoff {} s consumes the whole session",
                self.close_cutoff_secs
            )));
        }
        Ok(())
    }

    /// Nominal session length in seconds.
    pub fn length_secs(&self) -> i64 {
        seconds_of(self.close) - seconds_of(self.open)
    }

    /// Last admissible time of day after the closing trim.
    pub fn effective_close(&self) -> NaiveTime {
        self.close - chrono::Duration::seconds(self.close_cutoff_secs as i64)
    }
}

fn seconds_of(t: NaiveTime) -> i64 {
    t.num_seconds_from_midnight() as i64
}

/// Record layout of a tick file: delimiter-separated `(timestamp, price)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TickFormat {
    pub delimiter: char,
    /// chrono format string for the timestamp field.
    pub timestamp_format: String,
    /// Informational: the exchange-local zone the timestamps live in; parsing
    /// is naive (no conversion), the zone is echoed into manifests.
    pub timezone: String,
    /// Timestamps may step backwards by at most this many seconds (vendor
    /// jitter); larger backsteps are rejected.
    pub backstep_tolerance_secs: i64,
}

impl Default for TickFormat {
    fn default() -> Self {
        TickFormat {
            delimiter: ',',
            timestamp_format: "%Y-%m-%dT%H:%M:%S".into(),
            timezone: "Europe/Madrid".into(),
            backstep_tolerance_secs: 0,
        }
    }
}

/// Parsed, session-filtered ticks.
#[derive(Debug, Clone, PartialEq)]
pub struct TickSeries {
    pub ticks: Vec<Tick>,
    pub session: Session,
}

/// A non-fatal parse observation (lenient mode) with its 1-based line.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseWarning {
    pub line: usize,
    pub msg: String,
}

/// Per-day price grid produced by [`resample`].
#[derive(Debug, Clone, PartialEq)]
pub struct DayPrices {
    pub date: NaiveDate,
    /// Index of the first covered grid slot (days whose first tick arrives
    /// after the open start late instead of fabricating prices).
    pub first_slot: usize,
    pub prices: Vec<f64>,
}

/// Parse delimiter-separated `(timestamp, price)` records, validate them, and
/// keep only ticks inside `[open, close - cutoff]`.
///
/// In strict mode any malformed record, non-positive price, or
/// beyond-tolerance backstep is an error naming the line; in lenient mode the
/// offending record is skipped and reported as a warning.
pub fn parse_ticks<R: BufRead>(
    reader: R,
    format: &TickFormat,
    session: &Session,
    strict: bool,
) -> Result<(TickSeries, Vec<ParseWarning>)> {
    session.validate()?;
    let effective_close = session.effective_close();
    let mut ticks: Vec<Tick> = Vec::new();
    let mut warnings: Vec<ParseWarning> = Vec::new();
    let mut prev_ts: Option<NaiveDateTime> = None;

    let reject = |line: usize, err: Error, warnings: &mut Vec<ParseWarning>| -> Result<()> {
        if strict {
            Err(err)
        } else {
            warnings.push(ParseWarning { line, msg: err.to_string() });
            Ok(())
        }
    };

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split(format.delimiter);
        let (ts_field, price_field) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a.trim(), b.trim()),
            _ => {
                reject(
                    lineno,
                    Error::Parse {
                        line: lineno,
                        msg: format!("expected 2 fields separated by '{}'", format.delimiter),
                    },
                    &mut warnings,
                )?;
                continue;
            }
        };
        let timestamp = match NaiveDateTime::parse_from_str(ts_field, &format.timestamp_format) {
            Ok(t) => t,
            Err(e) => {
                reject(
                    lineno,
                    Error::Parse {
                        line: lineno,
                        msg: format!("bad timestamp '{ts_field}': {e}"),
                    },
                    &mut warnings,
                )?;
                continue;
            }
        };
        let price: f64 = match price_field.parse() {
            Ok(p) => p,
            Err(_) => {
                reject(
                    lineno,
                    Error::Parse {
                        line: lineno,
                        msg: format!("bad price '{price_field}'"),
                    },
                    &mut warnings,
                )?;
                continue;
            }
        };
        if !price.is_finite() || price <= 0.0 {
            reject(lineno, Error::NonPositivePrice { line: lineno, price }, &mut warnings)?;
            continue;
        }
        if let Some(prev) = prev_ts {
            let backstep = (prev - timestamp).num_seconds();
            if backstep > format.backstep_tolerance_secs {
                reject(
                    lineno,
                    Error::DecreasingTimestamp {
                        line: lineno,
                        by_seconds: backstep,
                        tolerance_seconds: format.backstep_tolerance_secs,
                    },
                    &mut warnings,
                )?;
                continue;
            }
        }
        prev_ts = Some(timestamp);

        let t = timestamp.time();
        if t < session.open || t > effective_close {
            continue; // outside the session window or inside the closing trim
        }
        ticks.push(Tick { timestamp, price });
    }

    // Within-tolerance backsteps are legal in the input; the series itself is
    // kept sorted (stable, so simultaneous ticks keep file order).
    ticks.sort_by_key(|t| t.timestamp);

    Ok((
        TickSeries {
            ticks,
            session: session.clone(),
        },
        warnings,
    ))
}

/// Resample onto the fixed clock grid `open + k * interval`,
/// last-observation-carried-forward, one grid per market day.
///
/// The grid runs to `close - cutoff` inclusive. Leading slots before the
/// day's first tick are dropped. Days that end up with no covered slot are
/// omitted with a warning.
pub fn resample(series: &TickSeries, interval_secs: u32) -> Result<(Vec<DayPrices>, Vec<String>)> {
    let session = &series.session;
    session.validate()?;
    if interval_secs == 0 {
        return Err(Error::Config("sampling interval must be positive".into()));
    }
    let interval = interval_secs as i64;
    if session.length_secs() % interval != 0 {
        return Err(Error::Config(format!(
            "interval {interval_secs} s does not divide the session length {} s",
            session.length_secs()
        )));
    }
    let open_secs = seconds_of(session.open);
    let last_slot = (seconds_of(session.effective_close()) - open_secs) / interval;

    let mut days: Vec<DayPrices> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    let mut i = 0usize;
    let ticks = &series.ticks;
    while i < ticks.len() {
        let date = ticks[i].timestamp.date();
        let mut j = i;
        while j < ticks.len() && ticks[j].timestamp.date() == date {
            j += 1;
        }
        let day_ticks = &ticks[i..j];
        i = j;

        let mut prices = Vec::with_capacity(last_slot as usize + 1);
        let mut first_slot = None;
        let mut cursor = 0usize;
        let mut last_price: Option<f64> = None;
        for k in 0..=last_slot {
            let slot_secs = open_secs + k * interval;
            while cursor < day_ticks.len()
                && seconds_of(day_ticks[cursor].timestamp.time()) <= slot_secs
            {
                last_price = Some(day_ticks[cursor].price);
                cursor += 1;
            }
            // Slots before the day's first tick stay uncovered.
            if let Some(p) = last_price {
                if first_slot.is_none() {
                    first_slot = Some(k as usize);
                }
                prices.push(p);
            }
        }
        match first_slot {
            Some(first) if !prices.is_empty() => days.push(DayPrices {
                date,
                first_slot: first,
                prices,
            }),
            _ => warnings.push(format!("day {date} has no coverable grid slot; omitted")),
        }
    }
    Ok((days, warnings))
}

/// Per-day log-returns `r_k = ln p_{k+1} - ln p_k`; overnight pairs are never
/// formed. Days with fewer than 2 prices are omitted with a warning.
pub fn log_returns(days: &[DayPrices], interval_secs: u32) -> Result<(ReturnSeries, Vec<String>)> {
    let mut blocks = Vec::with_capacity(days.len());
    let mut warnings = Vec::new();
    for day in days {
        if day.prices.len() < 2 {
            warnings.push(format!(
                "day {} has {} price(s); no returns formed",
                day.date,
                day.prices.len()
            ));
            continue;
        }
        if day.prices.iter().any(|&p| !p.is_finite() || p <= 0.0) {
            return Err(Error::Config(format!(
                "day {} contains a non-positive price",
                day.date
            )));
        }
        let returns: Vec<f64> = day
            .prices
            .windows(2)
            .map(|w| w[1].ln() - w[0].ln())
            .collect();
        blocks.push(DayBlock {
            date: day.date,
            returns,
        });
    }
    if blocks.is_empty() {
        return Err(Error::Empty("no day produced any returns".into()));
    }
    Ok((
        ReturnSeries {
            days: blocks,
            sampling_interval: interval_secs,
        },
        warnings,
    ))
}
