//! CSV ingestion of price series and CSV writing.
//!
//! Input has a header row `timestamp,price` or `timestamp,log_price`.
//! Timestamps are integer epoch seconds or ISO-8601 (date, naive date-time
//! read as UTC, or RFC 3339 with offset). Prices are logged on ingest.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use levy_window_core::{Error as CoreError, series::PriceSeries};

use crate::error::{CliError, CliResult};
use crate::report::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriceColumn {
    Price,
    LogPrice,
}

/// Seconds since the Unix epoch.
pub fn parse_timestamp(s: &str) -> Option<f64> {
    if let Ok(n) = s.parse::<i64>() {
        return Some(n as f64);
    }
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(seconds(t.timestamp(), t.timestamp_subsec_nanos()));
    }
    for f in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, f) {
            let t = t.and_utc();
            return Some(seconds(t.timestamp(), t.timestamp_subsec_nanos()));
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|t| t.and_utc().timestamp() as f64)
}

fn seconds(secs: i64, nanos: u32) -> f64 {
    secs as f64 + nanos as f64 * 1e-9
}

pub fn read_series(path: &Path) -> CliResult<PriceSeries> {
    let file = File::open(path).map_err(|source| CliError::MissingInput {
        path: path.to_path_buf(),
        source,
    })?;
    read_series_from(file, path)
}

pub fn read_series_from<R: std::io::Read>(reader: R, path: &Path) -> CliResult<PriceSeries> {
    let data = |line: u64, message: String| CliError::Data {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| data(1, e.to_string()))?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect::<Vec<_>>();
    let column = match header.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["timestamp", "price"] => PriceColumn::Price,
        ["timestamp", "log_price"] => PriceColumn::LogPrice,
        _ => {
            return Err(data(
                1,
                format!("expected header `timestamp,price` or `timestamp,log_price`, found `{}`", header.join(",")),
            ))
        }
    };

    let mut timestamps = Vec::new();
    let mut values = Vec::new();
    let mut lines = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            data(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(data(line, format!("expected 2 fields, found {}", record.len())));
        }
        let t = parse_timestamp(&record[0])
            .ok_or_else(|| data(line, format!("unparseable timestamp `{}`", &record[0])))?;
        let v: f64 = record[1]
            .parse()
            .map_err(|_| data(line, format!("unparseable number `{}`", &record[1])))?;
        let v = match column {
            PriceColumn::Price if v > 0.0 && v.is_finite() => v.ln(),
            PriceColumn::Price => return Err(data(line, format!("price must be positive and finite, got {v}"))),
            PriceColumn::LogPrice if v.is_finite() => v,
            PriceColumn::LogPrice => return Err(data(line, format!("log price must be finite, got {v}"))),
        };
        timestamps.push(t);
        values.push(v);
        lines.push(line);
    }
    PriceSeries::new(timestamps, values).map_err(|e| match e {
        CoreError::UnevenSpacing { index } => data(
            lines[index],
            "timestamp breaks the equal spacing of the series (gaps and duplicates are rejected)".into(),
        ),
        CoreError::SeriesTooShort { len, min } => data(
            lines.last().copied().unwrap_or(1),
            format!("{len} rows, need at least {min}"),
        ),
        e => CliError::Core(e),
    })
}

/// Writes `timestamp,log_price` rows with integer timestamps.
pub fn write_series<W: Write>(out: W, start: i64, step: i64, log_prices: &[f64]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["timestamp", "log_price"])?;
    for (i, x) in log_prices.iter().enumerate() {
        let t = start + step * i as i64;
        w.write_record([t.to_string(), fmt_f64(*x)])?;
    }
    w.flush()
}

/// Writes a header and rows of preformatted cells.
pub fn write_table<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str) -> CliResult<PriceSeries> {
        read_series_from(s.as_bytes(), Path::new("mem.csv"))
    }

    #[test]
    fn timestamps() {
        assert_eq!(parse_timestamp("86400"), Some(86400.0));
        assert_eq!(parse_timestamp("1970-01-02"), Some(86400.0));
        assert_eq!(parse_timestamp("1970-01-01T00:01:00"), Some(60.0));
        assert_eq!(parse_timestamp("1970-01-01T01:00:00+01:00"), Some(0.0));
        assert_eq!(parse_timestamp("1970-01-01 00:00:00.5"), Some(0.5));
        assert_eq!(parse_timestamp("yesterday"), None);
    }

    #[test]
    fn prices_are_logged() {
        let s = read("timestamp,price\n0,1\n60,2.718281828459045\n120,1\n").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.step(), 60.0);
        assert!((s.log_prices()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn malformed_rows_name_their_line() {
        let e = read("timestamp,log_price\n0,0.1\n1,abc\n").unwrap_err();
        assert!(matches!(e, CliError::Data { line: 3, .. }), "{e}");
        let e = read("timestamp,price\n0,1\n1,-2\n").unwrap_err();
        assert!(matches!(e, CliError::Data { line: 3, .. }), "{e}");
        let e = read("time,price\n0,1\n").unwrap_err();
        assert!(matches!(e, CliError::Data { line: 1, .. }), "{e}");
        let e = read("timestamp,price\n0,1,3\n").unwrap_err();
        assert!(matches!(e, CliError::Data { line: 2, .. }), "{e}");
    }

    #[test]
    fn gaps_are_rejected() {
        let e = read("timestamp,log_price\n0,0\n1,0\n2,0\n4,0\n").unwrap_err();
        assert!(matches!(e, CliError::Data { line: 5, .. }), "{e}");
        let e = read("timestamp,log_price\n0,0\n").unwrap_err();
        assert_eq!(e.exit_code(), crate::error::exit::DATA);
    }

    #[test]
    fn round_trip() {
        let xs = [0.0, 0.1, -0.30000000000000004, 1e-300];
        let mut buf = Vec::new();
        write_series(&mut buf, 100, 5, &xs).unwrap();
        let s = read(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(s.log_prices(), &xs);
        assert_eq!(s.timestamps(), &[100.0, 105.0, 110.0, 115.0]);
    }
}
