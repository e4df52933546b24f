//! Dated scalar series: CSV parsing and date-intersection alignment.

use std::collections::BTreeSet;
use std::io::Read;

use chrono::NaiveDate;

use crate::error::{Error, Result};

/// A labelled series of daily values on strictly increasing dates.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    label: String,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl TimeSeries {
    /// Builds a series, validating ordering, finiteness and length.
    pub fn new(label: impl Into<String>, dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        let label = label.into();
        if dates.len() != values.len() {
            return Err(Error::LengthMismatch(dates.len(), values.len()));
        }
        if dates.is_empty() {
            return Err(Error::EmptyInput(label));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if let Some(w) = dates.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "dates of `{label}` not strictly increasing at index {}",
                w + 1
            )));
        }
        Ok(Self {
            label,
            dates,
            values,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Series restricted to one shared date axis.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedDataset {
    series: Vec<TimeSeries>,
    dates: Vec<NaiveDate>,
}

impl AlignedDataset {
    pub fn series(&self) -> &[TimeSeries] {
        &self.series
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

    pub fn into_series(self) -> Vec<TimeSeries> {
        self.series
    }
}

/// Parses a `date,close` CSV. Rows may come in any order; output is sorted by
/// date. Rows with an empty close are treated as absent dates.
pub fn parse_csv<R: Read>(source: R, label: &str) -> Result<TimeSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let headers = reader
        .headers()
        .map_err(|e| csv_error(e, 1))?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::EmptyInput(label.to_string()));
    }
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim_start_matches('\u{feff}').eq_ignore_ascii_case(name))
    };
    let (date_col, close_col) = match (column("date"), column("close")) {
        (Some(d), Some(c)) => (d, c),
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `date,close`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            })
        }
    };
    if headers.len() > 2 {
        log::warn!(
            "{label}: ignoring {} extra column(s) beyond date,close",
            headers.len() - 2
        );
    }

    let mut rows: Vec<(NaiveDate, f64, u64)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            csv_error(e, line)
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let date_field = record.get(date_col).unwrap_or("");
        let date = NaiveDate::parse_from_str(date_field, "%Y-%m-%d").map_err(|_| Error::Parse {
            line,
            message: format!("malformed date `{date_field}`"),
        })?;
        let close_field = record.get(close_col).unwrap_or("");
        if close_field.is_empty() {
            continue;
        }
        let close: f64 = close_field.parse().map_err(|_| Error::Parse {
            line,
            message: format!("non-numeric close `{close_field}`"),
        })?;
        if !close.is_finite() {
            return Err(Error::Parse {
                line,
                message: format!("non-finite close `{close_field}`"),
            });
        }
        rows.push((date, close, line));
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput(label.to_string()));
    }

    rows.sort_by_key(|r| r.0);
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::DuplicateDate {
            line: w[0].2.max(w[1].2),
            date: w[1].0.to_string(),
        });
    }
    let (dates, values) = rows.into_iter().map(|(d, v, _)| (d, v)).unzip();
    TimeSeries::new(label, dates, values)
}

fn csv_error(e: csv::Error, line: u64) -> Error {
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

/// Restricts every series to the dates present in all of them.
pub fn align(series_list: &[TimeSeries]) -> Result<AlignedDataset> {
    if series_list.len() < 2 {
        return Err(Error::TooFewSeries {
            needed: 2,
            got: series_list.len(),
        });
    }
    let mut shared: BTreeSet<NaiveDate> = series_list[0].dates.iter().copied().collect();
    for s in &series_list[1..] {
        let other: BTreeSet<NaiveDate> = s.dates.iter().copied().collect();
        shared.retain(|d| other.contains(d));
    }
    if shared.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    let dates: Vec<NaiveDate> = shared.into_iter().collect();

    let series = series_list
        .iter()
        .map(|s| {
            let values = s
                .dates
                .iter()
                .zip(&s.values)
                .filter(|(d, _)| dates.binary_search(d).is_ok())
                .map(|(_, v)| *v)
                .collect();
            TimeSeries {
                label: s.label.clone(),
                dates: dates.clone(),
                values,
            }
        })
        .collect();
    Ok(AlignedDataset { series, dates })
}
