//! CSV readers and writers.
//!
//! * Event CSV: header row with a `Date` column in `MM/DD/YYYY`; every other
//!   column is ignored.
//! * Series CSV: header `timestamp,value`, timestamps `YYYY-MM-DD`.

use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDate;

use super::{parse_us_date, EventLog, TimeSeries};
use crate::error::{Error, Result};

pub fn read_events<R: Read>(reader: R) -> Result<EventLog> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = headers
        .iter()
        .position(|h| h.trim() == "Date")
        .ok_or_else(|| Error::invalid("event CSV has no `Date` column"))?;
    let mut dates = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let raw = record
            .get(col)
            .ok_or_else(|| Error::invalid(format!("row {} has no Date field", row + 2)))?;
        let date = parse_us_date(raw)
            .map_err(|e| Error::Date(format!("row {}: {e}", row + 2)))?;
        dates.push(date);
    }
    EventLog::new(dates)
}

pub fn read_events_file(path: impl AsRef<Path>) -> Result<EventLog> {
    read_events(std::fs::File::open(path)?)
}

/// Reads a series CSV; the step is inferred from the first two timestamps
/// and every later timestamp must sit on the same monthly grid.
pub fn read_series<R: Read>(reader: R) -> Result<TimeSeries> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() < 2 || headers[0].trim() != "timestamp" || headers[1].trim() != "value" {
        return Err(Error::invalid("series CSV header must be `timestamp,value`"));
    }
    let mut stamps = Vec::new();
    let mut values = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let stamp = NaiveDate::parse_from_str(record[0].trim(), "%Y-%m-%d")
            .map_err(|e| Error::Date(format!("row {}: {e}", row + 2)))?;
        let value: f64 = record[1]
            .trim()
            .parse()
            .map_err(|e| Error::invalid(format!("row {}: bad value {:?}: {e}", row + 2, &record[1])))?;
        stamps.push(stamp);
        values.push(value);
    }
    if stamps.is_empty() {
        return Err(Error::invalid("series CSV has no rows"));
    }
    let step = if stamps.len() > 1 { month_gap(stamps[0], stamps[1])? } else { 1 };
    let ts = TimeSeries::new(stamps[0], step, values)?;
    for (i, s) in stamps.iter().enumerate() {
        if ts.timestamp(i) != *s {
            return Err(Error::invalid(format!(
                "row {}: timestamp {s} breaks the {step}-month grid",
                i + 2
            )));
        }
    }
    Ok(ts)
}

pub fn read_series_file(path: impl AsRef<Path>) -> Result<TimeSeries> {
    read_series(std::fs::File::open(path)?)
}

fn month_gap(a: NaiveDate, b: NaiveDate) -> Result<u32> {
    use chrono::Datelike;
    let months = (b.year() - a.year()) * 12 + b.month() as i32 - a.month() as i32;
    if months <= 0 {
        return Err(Error::invalid(format!("timestamps {a} and {b} are not increasing by months")));
    }
    Ok(months as u32)
}

pub fn write_series<W: Write>(ts: &TimeSeries, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["timestamp", "value"])?;
    for (i, v) in ts.values().iter().enumerate() {
        w.write_record([ts.timestamp(i).format("%Y-%m-%d").to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_series_file(ts: &TimeSeries, path: impl AsRef<Path>) -> Result<()> {
    write_series(ts, std::fs::File::create(path)?)
}

/// Writes a series that may contain missing slots (empty value cells).
pub fn write_optional_series<W: Write>(
    start: &TimeSeries,
    values: &[Option<f64>],
    writer: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["timestamp", "value"])?;
    for (i, v) in values.iter().enumerate() {
        let cell = v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([start.timestamp(i).format("%Y-%m-%d").to_string(), cell])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_date_column_among_others() {
        let csv = "Date,Time,Location,Summary\n\
                   09/17/1908,17:18,\"Fort Myer, Virginia\",\"Demo flight, crashed\"\n\
                   07/12/1912,06:30,\"Atlantic City, New Jersey\",Test\n";
        let log = read_events(csv.as_bytes()).unwrap();
        assert_eq!(log.len(), 2);
    }

    #[test]
    fn missing_date_column_is_an_error() {
        let err = read_events("When,Where\n1,2\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn bad_date_reports_row() {
        let err = read_events("Date\n09/17/1908\nyesterday\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("row 3"), "{err}");
    }

    #[test]
    fn series_round_trip_keeps_full_precision() {
        let ts = TimeSeries::new(
            NaiveDate::from_ymd_opt(1908, 9, 1).unwrap(),
            10,
            vec![0.1 + 0.2, 1.0 / 3.0, -2.5e-17],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_series(&ts, &mut buf).unwrap();
        let back = read_series(buf.as_slice()).unwrap();
        assert_eq!(back, ts);
    }

    #[test]
    fn off_grid_timestamp_is_rejected() {
        let csv = "timestamp,value\n2000-01-01,1\n2000-07-01,2\n2001-02-01,3\n";
        assert!(read_series(csv.as_bytes()).is_err());
    }
}
