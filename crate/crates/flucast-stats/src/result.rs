use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Outcome of a hypothesis test.
///
/// `aux` records every tunable and derived quantity that shaped the result
/// (lags, tie corrections, clamp bounds, effective sample sizes), keyed by
/// stable snake_case names, so serialized reports can be read without the
/// source at hand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    /// Stable identifier, e.g. "mann_kendall".
    pub test: String,
    pub statistic: f64,
    pub p_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub df: Option<f64>,
    pub aux: BTreeMap<String, f64>,
}

impl TestResult {
    pub fn new(test: &str, statistic: f64, p_value: f64) -> Self {
        TestResult {
            test: test.to_string(),
            statistic,
            p_value,
            df: None,
            aux: BTreeMap::new(),
        }
    }

    pub fn with_df(mut self, df: f64) -> Self {
        self.df = Some(df);
        self
    }

    pub fn with_aux(mut self, key: &str, value: f64) -> Self {
        self.aux.insert(key.to_string(), value);
        self
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StatsError {
    #[error("{test}: need at least {needed} observations, got {got}")]
    TooFew {
        test: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("{test}: all observations are identical, statistic undefined")]
    Degenerate { test: &'static str },

    #[error("ljung_box: fitdf {fitdf} must be smaller than max_lag {max_lag}")]
    BadFitDf { fitdf: usize, max_lag: usize },

    #[error("{test}: lag {lag} too large for series of length {len}")]
    BadLag {
        test: &'static str,
        lag: usize,
        len: usize,
    },

    #[error("kruskal_wallis: group {group} is empty")]
    EmptyGroup { group: usize },

    #[error("kruskal_wallis: need at least two groups, got {0}")]
    TooFewGroups(usize),

    #[error("{test}: input contains a non-finite value")]
    NonFinite { test: &'static str },
}

pub(crate) fn ensure_finite(test: &'static str, values: &[f64]) -> Result<(), StatsError> {
    if values.iter().any(|v| !v.is_finite()) {
        Err(StatsError::NonFinite { test })
    } else {
        Ok(())
    }
}
