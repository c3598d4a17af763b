//! Core plumbing for monthly count series: validated containers, CSV
//! ingestion, train/test splitting, min-max scaling, sliding windows,
//! (seasonal) differencing with exact inverses, classical additive
//! decomposition, and forecast-accuracy metrics.
//!
//! Everything is `f64` end to end and deterministic: no randomness lives in
//! this crate.

pub mod decompose;
pub mod error;
pub mod metrics;
pub mod month;
pub mod series;
pub mod transform;

pub use decompose::{classical_additive_decompose, season_plot_data, Decomposition, SeasonTrace};
pub use error::CoreError;
pub use metrics::{
    gmrae, mae, metric_report, mse, theil_u1, Gmrae, MetricReport, ScaleTag, GMRAE_FLOOR,
};
pub use month::Month;
pub use series::{descriptive_stats, load_csv, train_test_split, Summary, TimeSeries};
pub use transform::{
    difference, integrate, make_windows, DifferencePivots, MinMaxScaler, WindowedDataset,
};
