//! Date-indexed series containers and calendar utilities.
//!
//! [`TimeSeries`] is the basic container: strictly increasing calendar dates
//! paired with finite values. Missing data is handled at ingestion (rows are
//! dropped and counted), never stored in-band as NaN. [`Panel`] holds several
//! named columns on a shared calendar, produced by [`align`].

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{Datelike, Duration, NaiveDate, Weekday};

use crate::error::{Error, Result};

/// A date-indexed vector of finite values with strictly increasing dates.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl TimeSeries {
    /// Builds a series, enforcing the container invariants:
    /// equal lengths, strictly increasing dates, all values finite.
    pub fn new(dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(Error::Invalid(format!(
                "dates ({}) and values ({}) differ in length",
                dates.len(),
                values.len()
            )));
        }
        if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Invalid(format!(
                "dates not strictly increasing at {}",
                w[1]
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!(
                "non-finite value at {}",
                dates[i]
            )));
        }
        Ok(Self { dates, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
        self.dates.iter().copied().zip(self.values.iter().copied())
    }

    pub fn into_parts(self) -> (Vec<NaiveDate>, Vec<f64>) {
        (self.dates, self.values)
    }

    /// Restricts to dates in `[from, to]` (either bound optional).
    pub fn slice(&self, from: Option<NaiveDate>, to: Option<NaiveDate>) -> Self {
        let keep = |d: &NaiveDate| {
            from.map_or(true, |f| *d >= f) && to.map_or(true, |t| *d <= t)
        };
        let (dates, values) = self
            .iter()
            .filter(|(d, _)| keep(d))
            .unzip();
        Self { dates, values }
    }
}

/// Generates `n` consecutive weekdays (Mon-Fri) starting at `start`,
/// which may itself fall on a weekend and is then rolled forward.
pub fn weekday_calendar(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = start;
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d += Duration::days(1);
    }
    out
}

/// Calendar origin used by the simulators: Monday 2000-01-03.
pub fn default_sim_start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date")
}

// ---- CSV ingestion ---------------------------------------------------------

/// How duplicate dates in an input file are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DuplicatePolicy {
    /// Duplicated date aborts the load (default: silent corruption is worse
    /// than a failed run).
    #[default]
    Error,
    /// The row appearing last in file order wins.
    LastWins,
}

/// A loaded series plus ingestion bookkeeping.
#[derive(Debug, Clone)]
pub struct LoadedSeries {
    pub series: TimeSeries,
    /// Rows dropped because the value field was missing or unparseable.
    pub dropped_values: usize,
    /// Rows shadowed by a later duplicate (only under `LastWins`).
    pub duplicates_resolved: usize,
    pub policy: DuplicatePolicy,
}

/// Reads a date/value series from a CSV file with a header row.
///
/// `date_format` is a chrono pattern (e.g. `%Y-%m-%d`). Rows whose value is
/// blank or unparseable are dropped and counted; an unparseable date is an
/// error. Rows are sorted by date after loading.
pub fn load_series(
    path: &Path,
    date_column: &str,
    value_column: &str,
    date_format: &str,
) -> Result<LoadedSeries> {
    load_series_with(path, date_column, value_column, date_format, DuplicatePolicy::Error)
}

/// Keeps a failure to open the file an I/O error, with the path attached.
pub(crate) fn open_error(e: csv::Error, path: &Path) -> Error {
    if !e.is_io_error() {
        return Error::Csv(e);
    }
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(std::io::Error::new(
            io.kind(),
            format!("{}: {io}", path.display()),
        )),
        _ => unreachable!("is_io_error guarantees an Io kind"),
    }
}

/// [`load_series`] with an explicit duplicate-date policy.
pub fn load_series_with(
    path: &Path,
    date_column: &str,
    value_column: &str,
    date_format: &str,
    policy: DuplicatePolicy,
) -> Result<LoadedSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| open_error(e, path))?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("{}: missing column '{name}'", path.display())))
    };
    let date_idx = col(date_column)?;
    let value_idx = col(value_column)?;

    let mut rows: Vec<(NaiveDate, f64)> = Vec::new();
    let mut dropped = 0usize;
    for record in rdr.records() {
        let record = record?;
        let raw_date = record.get(date_idx).unwrap_or("");
        let date = NaiveDate::parse_from_str(raw_date, date_format).map_err(|_| {
            Error::Parse(format!("{}: bad date '{raw_date}'", path.display()))
        })?;
        let raw = record.get(value_idx).unwrap_or("");
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => rows.push((date, v)),
            _ => dropped += 1,
        }
    }

    // Stable sort keeps file order within a date, so "last in file" is
    // well-defined for the LastWins policy.
    rows.sort_by_key(|(d, _)| *d);
    let mut dates = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(rows.len());
    let mut duplicates = 0usize;
    for (d, v) in rows {
        if dates.last() == Some(&d) {
            match policy {
                DuplicatePolicy::Error => {
                    return Err(Error::Invalid(format!(
                        "{}: duplicate date {d}",
                        path.display()
                    )))
                }
                DuplicatePolicy::LastWins => {
                    *values.last_mut().expect("non-empty") = v;
                    duplicates += 1;
                }
            }
        } else {
            dates.push(d);
            values.push(v);
        }
    }
    if dates.is_empty() {
        return Err(Error::Insufficient(format!(
            "{}: zero usable rows",
            path.display()
        )));
    }
    Ok(LoadedSeries {
        series: TimeSeries::new(dates, values)?,
        dropped_values: dropped,
        duplicates_resolved: duplicates,
        policy,
    })
}

// ---- Transforms ------------------------------------------------------------

/// Daily log returns r_t = ln(P_t) - ln(P_{t-1}), dated at t.
pub fn log_returns(prices: &TimeSeries) -> Result<TimeSeries> {
    if prices.len() < 2 {
        return Err(Error::Insufficient("log_returns needs length >= 2".into()));
    }
    if let Some(i) = prices.values.iter().position(|&p| p <= 0.0) {
        return Err(Error::Invalid(format!(
            "non-positive price at {}",
            prices.dates[i]
        )));
    }
    let values = prices
        .values
        .windows(2)
        .map(|w| w[1].ln() - w[0].ln())
        .collect();
    TimeSeries::new(prices.dates[1..].to_vec(), values)
}

/// First differences x_t - x_{t-1}, dated at t.
pub fn difference(series: &TimeSeries) -> Result<TimeSeries> {
    if series.len() < 2 {
        return Err(Error::Insufficient("difference needs length >= 2".into()));
    }
    let values = series.values.windows(2).map(|w| w[1] - w[0]).collect();
    TimeSeries::new(series.dates[1..].to_vec(), values)
}

/// Log first differences ln(x_t) - ln(x_{t-1}), dated at t.
///
/// Identical to [`log_returns`]; provided separately because it is applied to
/// level series (e.g. a volatility index) rather than asset prices.
pub fn log_difference(series: &TimeSeries) -> Result<TimeSeries> {
    log_returns(series)
}

// ---- Panel and alignment ---------------------------------------------------

/// Several named columns sharing one calendar.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    dates: Vec<NaiveDate>,
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Panel {
    pub fn new(dates: Vec<NaiveDate>, names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::Invalid("names/columns length mismatch".into()));
        }
        for (name, col) in names.iter().zip(&columns) {
            if col.len() != dates.len() {
                return Err(Error::Invalid(format!(
                    "column '{name}' has {} entries, expected {}",
                    col.len(),
                    dates.len()
                )));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::Invalid(format!("duplicate column name '{dup}'")));
        }
        if let Some(w) = dates.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Invalid(format!(
                "panel dates not strictly increasing at {}",
                w[1]
            )));
        }
        Ok(Self { dates, names, columns })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn width(&self) -> usize {
        self.names.len()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(&self.columns[i])
    }

    /// Extracts one column as a standalone series.
    pub fn series(&self, name: &str) -> Option<TimeSeries> {
        let col = self.column(name)?.to_vec();
        Some(TimeSeries {
            dates: self.dates.clone(),
            values: col,
        })
    }

    /// Restricts to dates in `[from, to]` (either bound optional).
    pub fn slice(&self, from: Option<NaiveDate>, to: Option<NaiveDate>) -> Self {
        let keep: Vec<bool> = self
            .dates
            .iter()
            .map(|d| from.map_or(true, |f| *d >= f) && to.map_or(true, |t| *d <= t))
            .collect();
        let dates = self
            .dates
            .iter()
            .zip(&keep)
            .filter_map(|(d, k)| k.then_some(*d))
            .collect();
        let columns = self
            .columns
            .iter()
            .map(|c| {
                c.iter()
                    .zip(&keep)
                    .filter_map(|(v, k)| k.then_some(*v))
                    .collect()
            })
            .collect();
        Self {
            dates,
            names: self.names.clone(),
            columns,
        }
    }
}

/// Calendar reconciliation policy for [`align`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignPolicy {
    /// Keep only dates present in every series.
    InnerJoin,
    /// On the union calendar, carry each series' last value forward for at
    /// most `max_gap_days` calendar days; dates where any series is staler
    /// than that (or has no history yet) are dropped.
    ForwardFill { max_gap_days: u32 },
}

/// Joins named series onto a common calendar according to `policy`.
pub fn align(series: &[(&str, &TimeSeries)], policy: AlignPolicy) -> Result<Panel> {
    if series.len() < 2 {
        return Err(Error::Invalid("align needs at least two series".into()));
    }
    let names: Vec<String> = series.iter().map(|(n, _)| n.to_string()).collect();
    let maps: Vec<BTreeMap<NaiveDate, f64>> = series
        .iter()
        .map(|(_, s)| s.iter().collect())
        .collect();

    let mut union: Vec<NaiveDate> = maps.iter().flat_map(|m| m.keys().copied()).collect();
    union.sort_unstable();
    union.dedup();

    let mut dates = Vec::new();
    let mut columns = vec![Vec::new(); series.len()];
    for d in union {
        let row: Option<Vec<f64>> = maps
            .iter()
            .map(|m| match policy {
                AlignPolicy::InnerJoin => m.get(&d).copied(),
                AlignPolicy::ForwardFill { max_gap_days } => {
                    m.range(..=d).next_back().and_then(|(last, v)| {
                        ((d - *last).num_days() <= i64::from(max_gap_days)).then_some(*v)
                    })
                }
            })
            .collect();
        if let Some(row) = row {
            dates.push(d);
            for (col, v) in columns.iter_mut().zip(row) {
                col.push(v);
            }
        }
    }
    if dates.is_empty() {
        return Err(Error::Insufficient(
            "alignment produced an empty calendar".into(),
        ));
    }
    Panel::new(dates, names, columns)
}
