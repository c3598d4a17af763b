use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::month::Month;

/// A contiguous monthly series of non-negative counts.
///
/// Invariants enforced at construction: at least one value, all values finite
/// and non-negative, and (because the container is start + dense vector) no
/// gaps or duplicate months by design. `period` is the seasonal cycle length,
/// 12 for calendar-month data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    start: Month,
    values: Vec<f64>,
    period: usize,
}

impl TimeSeries {
    pub fn new(start: Month, values: Vec<f64>, period: usize) -> Result<Self, CoreError> {
        if values.is_empty() {
            return Err(CoreError::EmptySeries);
        }
        if period < 2 {
            return Err(CoreError::BadPeriod(period));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(CoreError::NonFiniteValue { row: i + 1 });
            }
            if v < 0.0 {
                return Err(CoreError::NegativeValue { row: i + 1, value: v });
            }
        }
        Ok(TimeSeries { start, values, period })
    }

    pub fn start(&self) -> Month {
        self.start
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn month_at(&self, index: usize) -> Month {
        self.start.plus(index)
    }

    pub fn last_month(&self) -> Month {
        self.start.plus(self.values.len() - 1)
    }

    pub fn months(&self) -> impl Iterator<Item = Month> + '_ {
        (0..self.values.len()).map(move |i| self.start.plus(i))
    }
}

/// Reads a monthly series from a CSV file with a header row.
///
/// `date_column` must hold `YYYY-MM` or `YYYY-MM-DD` stamps and `value_column`
/// non-negative reals. Rows may arrive in any order; they are sorted by month.
/// Duplicate months and calendar gaps are hard errors (the gap error names the
/// first missing month).
pub fn load_csv(
    path: impl AsRef<Path>,
    date_column: &str,
    value_column: &str,
) -> Result<TimeSeries, CoreError> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => CoreError::Io {
                path: path.display().to_string(),
                source: std::io::Error::new(std::io::ErrorKind::Other, e.to_string()),
            },
            _ => CoreError::Csv(e),
        })?;

    let headers = reader.headers()?.clone();
    let date_idx = headers
        .iter()
        .position(|h| h == date_column)
        .ok_or_else(|| CoreError::MissingColumn(date_column.to_string()))?;
    let value_idx = headers
        .iter()
        .position(|h| h == value_column)
        .ok_or_else(|| CoreError::MissingColumn(value_column.to_string()))?;

    let mut rows: Vec<(Month, f64)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2; // 1-based, after the header line
        let record = record?;
        let date_text = record.get(date_idx).unwrap_or("");
        let month = Month::parse(date_text).ok_or_else(|| CoreError::BadDate {
            row,
            text: date_text.to_string(),
        })?;
        let value_text = record.get(value_idx).unwrap_or("");
        let value: f64 = value_text.parse().map_err(|_| CoreError::BadValue {
            row,
            text: value_text.to_string(),
        })?;
        if !value.is_finite() {
            return Err(CoreError::NonFiniteValue { row });
        }
        if value < 0.0 {
            return Err(CoreError::NegativeValue { row, value });
        }
        rows.push((month, value));
    }
    if rows.is_empty() {
        return Err(CoreError::EmptySeries);
    }

    rows.sort_by_key(|(m, _)| *m);
    for pair in rows.windows(2) {
        let (a, b) = (pair[0].0, pair[1].0);
        if a == b {
            return Err(CoreError::DuplicateMonth(a));
        }
        if b != a.next() {
            return Err(CoreError::MonthGap(a.next()));
        }
    }

    let start = rows[0].0;
    let values = rows.into_iter().map(|(_, v)| v).collect();
    TimeSeries::new(start, values, 12)
}

/// Splits a series at `boundary`: train covers everything up to and including
/// the boundary month, test everything after. Both sides must be non-empty.
pub fn train_test_split(
    series: &TimeSeries,
    boundary: Month,
) -> Result<(TimeSeries, TimeSeries), CoreError> {
    let offset = boundary.index_from(series.start());
    if offset < 0 || offset + 1 >= series.len() as i64 {
        return Err(CoreError::BadSplitBoundary(boundary));
    }
    let cut = (offset + 1) as usize;
    let train = TimeSeries::new(
        series.start(),
        series.values()[..cut].to_vec(),
        series.period(),
    )?;
    let test = TimeSeries::new(
        series.start().plus(cut),
        series.values()[cut..].to_vec(),
        series.period(),
    )?;
    Ok((train, test))
}

/// Five-number summary plus the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

/// Quantile of a sorted slice by linear interpolation of order statistics
/// (the convention where `p` lands at index `p * (n - 1)`).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    debug_assert!((0.0..=1.0).contains(&p));
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

pub fn descriptive_stats(values: &[f64]) -> Result<Summary, CoreError> {
    if values.is_empty() {
        return Err(CoreError::EmptySeries);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    Ok(Summary {
        min: sorted[0],
        q1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        mean,
        q3: quantile_sorted(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_a_small_csv_in_date_order() {
        let f = write_csv("date,cases\n2009-02,5\n2009-01,3\n2009-03,7.5\n");
        let ts = load_csv(f.path(), "date", "cases").unwrap();
        assert_eq!(ts.start(), Month { year: 2009, month: 1 });
        assert_eq!(ts.values(), &[3.0, 5.0, 7.5]);
        assert_eq!(ts.period(), 12);
        assert_eq!(ts.last_month(), Month { year: 2009, month: 3 });
    }

    #[test]
    fn rejects_duplicate_months() {
        let f = write_csv("date,cases\n2009-01,3\n2009-01,4\n");
        match load_csv(f.path(), "date", "cases") {
            Err(CoreError::DuplicateMonth(m)) => {
                assert_eq!(m, Month { year: 2009, month: 1 })
            }
            other => panic!("expected duplicate-month error, got {other:?}"),
        }
    }

    #[test]
    fn gap_error_names_the_missing_month() {
        let f = write_csv("date,cases\n2009-01,3\n2009-02,4\n2009-04,6\n");
        match load_csv(f.path(), "date", "cases") {
            Err(CoreError::MonthGap(m)) => {
                assert_eq!(m, Month { year: 2009, month: 3 });
                assert_eq!(m.to_string(), "2009-03");
            }
            other => panic!("expected gap error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_negative_and_garbage_values() {
        let f = write_csv("date,cases\n2009-01,-3\n");
        assert!(matches!(
            load_csv(f.path(), "date", "cases"),
            Err(CoreError::NegativeValue { .. })
        ));
        let f = write_csv("date,cases\n2009-01,abc\n");
        assert!(matches!(
            load_csv(f.path(), "date", "cases"),
            Err(CoreError::BadValue { .. })
        ));
        let f = write_csv("time,cases\n2009-01,3\n");
        assert!(matches!(
            load_csv(f.path(), "date", "cases"),
            Err(CoreError::MissingColumn(c)) if c == "date"
        ));
    }

    #[test]
    fn split_keeps_boundary_in_train() {
        let start = Month { year: 2020, month: 1 };
        let ts = TimeSeries::new(start, (0..36).map(f64::from).collect(), 12).unwrap();
        let (train, test) = train_test_split(&ts, Month { year: 2021, month: 12 }).unwrap();
        assert_eq!(train.len(), 24);
        assert_eq!(test.len(), 12);
        assert_eq!(test.start(), Month { year: 2022, month: 1 });
        assert_eq!(train.values()[23], 23.0);
        assert_eq!(test.values()[0], 24.0);
    }

    #[test]
    fn split_rejects_degenerate_boundaries() {
        let start = Month { year: 2020, month: 1 };
        let ts = TimeSeries::new(start, (0..24).map(f64::from).collect(), 12).unwrap();
        // Boundary at the last month leaves an empty test segment.
        assert!(train_test_split(&ts, Month { year: 2021, month: 12 }).is_err());
        // Boundary before the series starts leaves an empty train segment.
        assert!(train_test_split(&ts, Month { year: 2019, month: 12 }).is_err());
    }

    #[test]
    fn quartiles_interpolate_between_order_statistics() {
        // 1..=10: q1 = 3.25, median = 5.5, q3 = 7.75 under the
        // linear-interpolation convention.
        let values: Vec<f64> = (1..=10).map(f64::from).collect();
        let s = descriptive_stats(&values).unwrap();
        assert_eq!(s.min, 1.0);
        assert!((s.q1 - 3.25).abs() < 1e-12);
        assert!((s.median - 5.5).abs() < 1e-12);
        assert!((s.mean - 5.5).abs() < 1e-12);
        assert!((s.q3 - 7.75).abs() < 1e-12);
        assert_eq!(s.max, 10.0);
    }

    #[test]
    fn constructor_rejects_bad_values() {
        let start = Month { year: 2020, month: 1 };
        assert!(matches!(
            TimeSeries::new(start, vec![], 12),
            Err(CoreError::EmptySeries)
        ));
        assert!(matches!(
            TimeSeries::new(start, vec![1.0, f64::NAN], 12),
            Err(CoreError::NonFiniteValue { row: 2 })
        ));
        assert!(matches!(
            TimeSeries::new(start, vec![1.0, -0.5], 12),
            Err(CoreError::NegativeValue { row: 2, .. })
        ));
        assert!(matches!(
            TimeSeries::new(start, vec![1.0], 1),
            Err(CoreError::BadPeriod(1))
        ));
    }
}
