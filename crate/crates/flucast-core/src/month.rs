use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// A calendar month. `month` is 1-based (1 = January).
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Month {
    pub year: i32,
    pub month: u8,
}

pub const MONTH_NAMES: [&str; 12] = [
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];

impl Month {
    pub fn new(year: i32, month: u32) -> Result<Self, CoreError> {
        if !(1..=12).contains(&month) {
            return Err(CoreError::BadMonth(month));
        }
        Ok(Month {
            year,
            month: month as u8,
        })
    }

    /// Parses `YYYY-MM` or `YYYY-MM-DD` (the day, when present, is ignored:
    /// rows are monthly aggregates stamped with an arbitrary day).
    pub fn parse(text: &str) -> Option<Self> {
        let mut parts = text.trim().split('-');
        let year: i32 = parts.next()?.parse().ok()?;
        let month: u32 = parts.next()?.parse().ok()?;
        if let Some(day) = parts.next() {
            // Accept only a plausible day-of-month suffix.
            let d: u32 = day.parse().ok()?;
            if !(1..=31).contains(&d) {
                return None;
            }
        }
        if parts.next().is_some() {
            return None;
        }
        Month::new(year, month).ok()
    }

    /// The month `k` steps after this one.
    pub fn plus(self, k: usize) -> Self {
        let zero = self.year as i64 * 12 + (self.month as i64 - 1) + k as i64;
        Month {
            year: zero.div_euclid(12) as i32,
            month: (zero.rem_euclid(12) + 1) as u8,
        }
    }

    pub fn next(self) -> Self {
        self.plus(1)
    }

    /// Signed number of months from `origin` to `self`.
    pub fn index_from(self, origin: Month) -> i64 {
        (self.year as i64 * 12 + self.month as i64) - (origin.year as i64 * 12 + origin.month as i64)
    }

    /// English month name ("January" .. "December").
    pub fn name(self) -> &'static str {
        MONTH_NAMES[(self.month - 1) as usize]
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}
