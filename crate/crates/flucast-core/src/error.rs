use crate::month::Month;

/// Errors raised by the core containers and transforms.
///
/// Everything here is a data-contract violation (malformed input, impossible
/// request) rather than a numerical failure; callers that need process exit
/// codes map these to the "data error" class.
#[derive(Debug, thiserror::Error)]
pub enum CoreError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv parse error: {0}")]
    Csv(#[from] csv::Error),

    #[error("csv is missing required column {0:?}")]
    MissingColumn(String),

    #[error("row {row}: cannot parse date {text:?} (expected YYYY-MM or YYYY-MM-DD)")]
    BadDate { row: usize, text: String },

    #[error("row {row}: cannot parse value {text:?} as a real number")]
    BadValue { row: usize, text: String },

    #[error("row {row}: value {value} is negative; this series holds counts")]
    NegativeValue { row: usize, value: f64 },

    #[error("row {row}: value is not finite")]
    NonFiniteValue { row: usize },

    #[error("month {0} appears more than once")]
    DuplicateMonth(Month),

    #[error("series has a gap: month {0} is missing")]
    MonthGap(Month),

    #[error("month out of range: {0}")]
    BadMonth(u32),

    #[error("series is empty")]
    EmptySeries,

    #[error("series too short: need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("split boundary {0} does not leave both a train and a test segment")]
    BadSplitBoundary(Month),

    #[error("cannot fit a min-max scaler on a constant series")]
    ConstantSeries,

    #[error("window length {window} must be in 1..{max} for a series of length {len}")]
    BadWindowLength { window: usize, len: usize, max: usize },

    #[error("differencing removes {removed} observations but the series has only {len}")]
    OverDifferenced { removed: usize, len: usize },

    #[error("seasonal period must be at least 2, got {0}")]
    BadPeriod(usize),

    #[error("actual and predicted lengths differ: {actual} vs {predicted}")]
    LengthMismatch { actual: usize, predicted: usize },

    #[error("metric undefined: {0}")]
    DegenerateMetric(&'static str),
}
