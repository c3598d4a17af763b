//! Classical forecasting models for monthly count series: additive
//! Holt-Winters smoothing and seasonal ARIMA fitted by conditional sum of
//! squares, plus the shared derivative-free optimizer and the sample
//! ACF/PACF helpers used for order selection.

pub mod error;
pub mod ets;
pub mod optim;
pub mod sarima;

pub use error::ClassicalError;
pub use ets::{
    fit_holt_winters, hw_filter, hw_forecast, HoltWintersFit, HoltWintersParams, HoltWintersState,
    HwFilterOutput, RestartTrace,
};
pub use optim::{logit, nelder_mead, sigmoid, NelderMeadOptions, NelderMeadResult};
pub use sarima::{
    acf, acf_confidence_bound, ar_weights_stationary, css_loglik, expand_ar_weights,
    expand_ma_weights, fit_sarima, grid_search, ma_weights_invertible, pacf, CoefficientEstimate,
    CssFit, GridSearchRow, SarimaCoefficients, SarimaFit, SarimaOrder,
};
