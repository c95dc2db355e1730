//! Regularly spaced series, event ingestion and the invertible transforms
//! used to stationarize a series before modelling.
//!
//! A [`TimeSeries`] never stores per-point timestamps: it carries a start
//! date and a step in whole calendar months, and every value `k` sits at
//! `start + k * step`.

mod decompose;
pub mod io;
mod transform;

pub use decompose::{decompose, Decomposition};
pub use transform::{
    arcsin_transform, difference, difference_lags, ewma, exp_restore, log_transform,
    moving_average, sin_restore, undifference, undifference_forecast, DiffPass, TransformKind,
    TransformState, DEFAULT_ARCSIN_MARGIN,
};

use chrono::{Datelike, Months, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Adds `months` calendar months to `date` (proleptic Gregorian, day clamped
/// to the end of shorter months).
pub fn add_months(date: NaiveDate, months: u32) -> NaiveDate {
    date.checked_add_months(Months::new(months))
        .expect("date arithmetic overflowed the supported calendar range")
}

/// First day of the month containing `date`.
pub fn month_start(date: NaiveDate) -> NaiveDate {
    NaiveDate::from_ymd_opt(date.year(), date.month(), 1).expect("valid month start")
}

/// A log of dated events (one per crash report, say), sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventLog {
    dates: Vec<NaiveDate>,
}

impl EventLog {
    pub const MIN_DATE: NaiveDate = match NaiveDate::from_ymd_opt(1800, 1, 1) {
        Some(d) => d,
        None => panic!("bad constant"),
    };
    pub const MAX_DATE: NaiveDate = match NaiveDate::from_ymd_opt(2200, 12, 31) {
        Some(d) => d,
        None => panic!("bad constant"),
    };

    pub fn new(dates: Vec<NaiveDate>) -> Result<Self> {
        Self::with_range(dates, Self::MIN_DATE, Self::MAX_DATE)
    }

    /// Builds a log whose dates must all fall inside `[min, max]`.
    pub fn with_range(mut dates: Vec<NaiveDate>, min: NaiveDate, max: NaiveDate) -> Result<Self> {
        if dates.is_empty() {
            return Err(Error::invalid("event log is empty"));
        }
        if let Some(bad) = dates.iter().find(|d| **d < min || **d > max) {
            return Err(Error::Date(format!("{bad} lies outside [{min}, {max}]")));
        }
        dates.sort_unstable();
        Ok(Self { dates })
    }

    /// Parses `MM/DD/YYYY` strings.
    pub fn parse_us_dates<S: AsRef<str>>(raw: &[S]) -> Result<Self> {
        let dates = raw
            .iter()
            .map(|s| parse_us_date(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dates)
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn first(&self) -> NaiveDate {
        self.dates[0]
    }

    pub fn last(&self) -> NaiveDate {
        self.dates[self.dates.len() - 1]
    }
}

pub(crate) fn parse_us_date(s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%m/%d/%Y")
        .map_err(|e| Error::Date(format!("cannot parse {s:?} as MM/DD/YYYY: {e}")))
}

/// Regularly spaced real-valued series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    start: NaiveDate,
    step_months: u32,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(start: NaiveDate, step_months: u32, values: Vec<f64>) -> Result<Self> {
        if step_months == 0 {
            return Err(Error::invalid("step must be at least one month"));
        }
        if values.is_empty() {
            return Err(Error::invalid("series must contain at least one value"));
        }
        Ok(Self { start, step_months, values })
    }

    /// Monthly series starting 2000-01-01; handy for synthetic data.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(NaiveDate::from_ymd_opt(2000, 1, 1).unwrap(), 1, values)
    }

    pub fn start(&self) -> NaiveDate {
        self.start
    }

    pub fn step_months(&self) -> u32 {
        self.step_months
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn timestamp(&self, index: usize) -> NaiveDate {
        add_months(self.start, self.step_months * index as u32)
    }

    pub fn end(&self) -> NaiveDate {
        self.timestamp(self.len() - 1)
    }

    /// A series on the same grid, starting `offset` steps after this one.
    pub fn shifted(&self, offset: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(self.timestamp(offset), self.step_months, values)
    }

    /// A series on the same grid, starting `offset` steps before this one.
    pub fn shifted_back(&self, offset: usize, values: Vec<f64>) -> Result<Self> {
        let start = self
            .start
            .checked_sub_months(Months::new(self.step_months * offset as u32))
            .ok_or_else(|| Error::invalid("start date underflow"))?;
        Self::new(start, self.step_months, values)
    }

    pub fn slice(&self, from: usize, to: usize) -> Result<Self> {
        if from >= to || to > self.len() {
            return Err(Error::invalid(format!(
                "slice {from}..{to} out of range for length {}",
                self.len()
            )));
        }
        self.shifted(from, self.values[from..to].to_vec())
    }
}

/// Counts events per interval `[origin + k*step, origin + (k+1)*step)`.
///
/// `origin` defaults to the first day of the month of the earliest event.
/// Empty intervals yield zero; the series runs through the last event.
pub fn aggregate_events(
    events: &EventLog,
    step_months: u32,
    origin: Option<NaiveDate>,
) -> Result<TimeSeries> {
    if step_months == 0 {
        return Err(Error::invalid("step must be at least one month"));
    }
    if events.is_empty() {
        return Err(Error::invalid("event log is empty"));
    }
    let origin = origin.unwrap_or_else(|| month_start(events.first()));
    if origin > events.first() {
        return Err(Error::invalid(format!(
            "origin {origin} is after the first event {}",
            events.first()
        )));
    }
    let mut counts: Vec<f64> = Vec::new();
    for &date in events.dates() {
        let k = interval_index(origin, step_months, date);
        if counts.len() <= k {
            counts.resize(k + 1, 0.0);
        }
        counts[k] += 1.0;
    }
    TimeSeries::new(origin, step_months, counts)
}

fn interval_index(origin: NaiveDate, step: u32, date: NaiveDate) -> usize {
    let months = (date.year() - origin.year()) * 12 + date.month() as i32 - origin.month() as i32;
    let mut k = (months.max(0) as u32) / step;
    while k > 0 && add_months(origin, k * step) > date {
        k -= 1;
    }
    while add_months(origin, (k + 1) * step) <= date {
        k += 1;
    }
    k as usize
}

/// Fraction of the series held out for testing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
}

impl SplitSpec {
    pub fn new(test_fraction: f64) -> Result<Self> {
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            return Err(Error::invalid(format!(
                "test fraction {test_fraction} must lie strictly between 0 and 1"
            )));
        }
        Ok(Self { test_fraction })
    }

    /// Training length: `ceil(n * (1 - f))`.
    pub fn train_len(&self, n: usize) -> usize {
        // Guard against 0.8 * 10 = 8.000000000000002 style rounding.
        let exact = n as f64 * (1.0 - self.test_fraction);
        (exact - 1e-9).ceil().max(0.0) as usize
    }
}

/// Chronological split: the first `ceil(n(1-f))` points train, the rest test.
pub fn train_test_split(ts: &TimeSeries, spec: SplitSpec) -> Result<(TimeSeries, TimeSeries)> {
    let spec = SplitSpec::new(spec.test_fraction)?;
    let n = ts.len();
    let train = spec.train_len(n);
    if train < 2 {
        return Err(Error::too_short(format!(
            "training part would hold {train} points (need at least 2)"
        )));
    }
    if train >= n {
        return Err(Error::too_short(format!(
            "test part would be empty for n = {n} and fraction {}",
            spec.test_fraction
        )));
    }
    Ok((ts.slice(0, train)?, ts.slice(train, n)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    #[test]
    fn aggregates_into_six_month_buckets() {
        let events = EventLog::new(vec![d(2000, 1, 5), d(2000, 2, 1), d(2000, 8, 30)]).unwrap();
        let ts = aggregate_events(&events, 6, Some(d(2000, 1, 1))).unwrap();
        assert_eq!(ts.values(), &[2.0, 1.0]);
        assert_eq!(ts.timestamp(1), d(2000, 7, 1));
    }

    #[test]
    fn empty_interior_interval_is_zero() {
        let events = EventLog::new(vec![d(2000, 1, 5), d(2001, 7, 1)]).unwrap();
        let ts = aggregate_events(&events, 6, None).unwrap();
        assert_eq!(ts.values(), &[1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn interval_boundaries_are_half_open() {
        let events = EventLog::new(vec![d(2000, 6, 30), d(2000, 7, 1)]).unwrap();
        let ts = aggregate_events(&events, 6, Some(d(2000, 1, 1))).unwrap();
        assert_eq!(ts.values(), &[1.0, 1.0]);
    }

    #[test]
    fn origin_with_mid_month_day() {
        let origin = d(2000, 1, 15);
        assert_eq!(interval_index(origin, 1, d(2000, 2, 14)), 0);
        assert_eq!(interval_index(origin, 1, d(2000, 2, 15)), 1);
        assert_eq!(interval_index(origin, 12, d(2003, 1, 14)), 2);
    }

    #[test]
    fn origin_after_first_event_is_rejected() {
        let events = EventLog::new(vec![d(2000, 1, 5)]).unwrap();
        assert!(aggregate_events(&events, 6, Some(d(2000, 2, 1))).is_err());
    }

    #[test]
    fn event_log_rejects_empty_and_bad_dates() {
        assert!(EventLog::new(vec![]).is_err());
        assert!(EventLog::parse_us_dates(&["13/45/2000"]).is_err());
        assert!(EventLog::with_range(vec![d(1700, 1, 1)], EventLog::MIN_DATE, EventLog::MAX_DATE)
            .is_err());
        let log = EventLog::parse_us_dates(&["09/17/1908", "07/12/1912", "08/06/1913"]).unwrap();
        assert_eq!(log.first(), d(1908, 9, 17));
    }

    #[test]
    fn split_lengths() {
        let ts = TimeSeries::from_values((0..10).map(f64::from).collect()).unwrap();
        let (train, test) = train_test_split(&ts, SplitSpec::new(0.2).unwrap()).unwrap();
        assert_eq!((train.len(), test.len()), (8, 2));
        assert_eq!(add_months(train.end(), 1), test.start());

        let ts = TimeSeries::from_values(vec![1.0; 109]).unwrap();
        let (train, test) = train_test_split(&ts, SplitSpec::new(0.1).unwrap()).unwrap();
        assert_eq!((train.len(), test.len()), (99, 10));
    }

    #[test]
    fn split_rejects_degenerate_fractions() {
        let ts = TimeSeries::from_values(vec![1.0; 10]).unwrap();
        assert!(train_test_split(&ts, SplitSpec { test_fraction: 0.999 }).is_err());
        assert!(SplitSpec::new(0.0).is_err());
        assert!(SplitSpec::new(1.0).is_err());
    }
}
