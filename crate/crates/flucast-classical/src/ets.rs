//! Additive Holt-Winters (triple exponential smoothing).
//!
//! State recursions, with m the seasonal period and s indexed by time:
//!   level:    l_t = alpha * (y_t - s_{t-m}) + (1 - alpha) * (l_{t-1} + b_{t-1})
//!   slope:    b_t = beta  * (l_t - l_{t-1}) + (1 - beta)  * b_{t-1}
//!   seasonal: s_t = gamma * (y_t - l_{t-1} - b_{t-1}) + (1 - gamma) * s_{t-m}
//!   forecast: yhat_{t+h} = l_t + h * b_t + s_{t+h-m(k+1)},  k = floor((h-1)/m)
//!
//! Note the seasonal update deliberately subtracts the *previous* level and
//! slope, not the just-updated level.
//!
//! Initialization from the first two cycles: level = mean of cycle one,
//! slope = (mean of cycle two - mean of cycle one) / m, seasonals = cycle-one
//! values minus the cycle-one mean. The filter starts at t = m, so fitted
//! values and residuals have length n - m.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ClassicalError;
use crate::optim::{logit, nelder_mead, sigmoid, NelderMeadOptions};

/// Smoothing weights. Boxes: alpha in (0,1), beta in [0,1), gamma in (0,1].
/// The closed ends matter: optimized fits on sticky-seasonal data genuinely
/// land on beta = 0 and gamma = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoltWintersParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl HoltWintersParams {
    pub fn validate(&self) -> Result<(), ClassicalError> {
        if !(self.alpha.is_finite() && self.beta.is_finite() && self.gamma.is_finite()) {
            return Err(ClassicalError::NonFinite);
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ClassicalError::ParamOutOfBox {
                name: "alpha",
                value: self.alpha,
                box_desc: "(0, 1)",
            });
        }
        if !(self.beta >= 0.0 && self.beta < 1.0) {
            return Err(ClassicalError::ParamOutOfBox {
                name: "beta",
                value: self.beta,
                box_desc: "[0, 1)",
            });
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(ClassicalError::ParamOutOfBox {
                name: "gamma",
                value: self.gamma,
                box_desc: "(0, 1]",
            });
        }
        Ok(())
    }
}

/// Smoothing state at one point in time. `seasonals` holds the most recent
/// `m` seasonal states in chronological order: `seasonals[0]` applies to the
/// month one step ahead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoltWintersState {
    pub level: f64,
    pub slope: f64,
    pub seasonals: Vec<f64>,
}

/// Output of one filter pass at fixed parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HwFilterOutput {
    pub params: HoltWintersParams,
    pub initial: HoltWintersState,
    pub state: HoltWintersState,
    /// One-step-ahead in-sample forecasts for t = m .. n-1.
    pub fitted: Vec<f64>,
    /// y_t - fitted_t, same alignment.
    pub residuals: Vec<f64>,
    pub sse: f64,
    /// Full level path l_m .. l_{n-1} (useful for shift diagnostics).
    pub level_path: Vec<f64>,
}

/// Runs the additive Holt-Winters filter at fixed parameters.
pub fn hw_filter(
    values: &[f64],
    period: usize,
    params: &HoltWintersParams,
) -> Result<HwFilterOutput, ClassicalError> {
    params.validate()?;
    if period < 2 {
        return Err(ClassicalError::BadOrder(format!(
            "seasonal period must be at least 2, got {period}"
        )));
    }
    let n = values.len();
    if n < 2 * period {
        return Err(ClassicalError::NotEnoughData {
            needed: 2 * period,
            got: n,
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ClassicalError::NonFinite);
    }

    let m = period;
    let mf = m as f64;
    let cycle1_mean = values[..m].iter().sum::<f64>() / mf;
    let cycle2_mean = values[m..2 * m].iter().sum::<f64>() / mf;

    let mut level = cycle1_mean;
    let mut slope = (cycle2_mean - cycle1_mean) / mf;
    // s[t] for t < m comes from initialization; afterwards it is updated.
    let mut seasonal: Vec<f64> = values[..m].iter().map(|y| y - cycle1_mean).collect();
    let initial = HoltWintersState {
        level,
        slope,
        seasonals: seasonal.clone(),
    };

    let mut fitted = Vec::with_capacity(n - m);
    let mut residuals = Vec::with_capacity(n - m);
    let mut level_path = Vec::with_capacity(n - m);
    let (alpha, beta, gamma) = (params.alpha, params.beta, params.gamma);
    let mut sse = 0.0;

    for t in m..n {
        let s_tm = seasonal[t - m];
        let y = values[t];
        let one_step = level + slope + s_tm;
        let e = y - one_step;
        fitted.push(one_step);
        residuals.push(e);
        sse += e * e;

        let prev_level = level;
        let prev_slope = slope;
        level = alpha * (y - s_tm) + (1.0 - alpha) * (prev_level + prev_slope);
        slope = beta * (level - prev_level) + (1.0 - beta) * prev_slope;
        seasonal.push(gamma * (y - prev_level - prev_slope) + (1.0 - gamma) * s_tm);
        level_path.push(level);
    }

    let state = HoltWintersState {
        level,
        slope,
        seasonals: seasonal[n - m..].to_vec(),
    };
    Ok(HwFilterOutput {
        params: *params,
        initial,
        state,
        fitted,
        residuals,
        sse,
        level_path,
    })
}

/// Forecasts `horizon` steps ahead from a final smoothing state.
pub fn hw_forecast(state: &HoltWintersState, horizon: usize) -> Vec<f64> {
    let m = state.seasonals.len();
    (1..=horizon)
        .map(|h| state.level + h as f64 * state.slope + state.seasonals[(h - 1) % m])
        .collect()
}

/// One optimizer restart's outcome, kept for the fit record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartTrace {
    pub restart: usize,
    pub iterations: usize,
    pub sse: f64,
    pub converged: bool,
}

/// A fitted Holt-Winters model: the SSE-optimal parameters, the filter output
/// at those parameters, and the optimizer trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoltWintersFit {
    pub params: HoltWintersParams,
    pub output: HwFilterOutput,
    pub optimizer_trace: Vec<RestartTrace>,
}

/// Fits (alpha, beta, gamma) by minimizing the one-step-ahead SSE with
/// Nelder-Mead in logit space (so box constraints cannot be violated), from a
/// fixed start plus three jittered restarts spread across the whole box (the
/// SSE surface is multimodal in gamma on strongly seasonal series, so the
/// restarts must not huddle around one corner). Deterministic: the jitter
/// stream is seeded with a constant.
pub fn fit_holt_winters(values: &[f64], period: usize) -> Result<HoltWintersFit, ClassicalError> {
    // Validate shape once up front with a legal parameter set.
    hw_filter(
        values,
        period,
        &HoltWintersParams {
            alpha: 0.5,
            beta: 0.1,
            gamma: 0.1,
        },
    )?;

    // Unconstrained -> box mapping. |u| is capped so the sigmoid saturates to
    // the closed box ends (beta -> 0, gamma -> 1) instead of overflowing.
    let cap = 40.0;
    let to_params = |u: &[f64]| HoltWintersParams {
        alpha: sigmoid(u[0].clamp(-cap, cap)).clamp(f64::MIN_POSITIVE, 1.0 - 1e-12),
        beta: {
            let b = sigmoid(u[1].clamp(-cap, cap));
            if b < 1e-12 {
                0.0
            } else {
                b.min(1.0 - 1e-12)
            }
        },
        gamma: sigmoid(u[2].clamp(-cap, cap)).max(f64::MIN_POSITIVE),
    };

    let mut objective = |u: &[f64]| -> f64 {
        let params = to_params(u);
        match hw_filter(values, period, &params) {
            Ok(out) => out.sse,
            Err(_) => f64::INFINITY,
        }
    };

    let base = [logit(0.3), logit(0.1), logit(0.1)];
    let mut rng = ChaCha8Rng::seed_from_u64(0x484f4c54); // fixed: fits are deterministic
    let opts = NelderMeadOptions {
        max_iters: 2000,
        tol: 1e-8,
        init_step: 0.5,
    };

    let mut best: Option<(Vec<f64>, f64, Vec<RestartTrace>)> = None;
    let mut trace = Vec::new();
    for restart in 0..4 {
        let start: Vec<f64> = if restart == 0 {
            base.to_vec()
        } else {
            // Uniform in logit space over roughly (0.03, 0.97) per coordinate.
            (0..3).map(|_| rng.gen_range(-3.5..3.5)).collect()
        };
        let r = nelder_mead(&mut objective, &start, &opts);
        trace.push(RestartTrace {
            restart,
            iterations: r.iterations,
            sse: r.fx,
            converged: r.converged,
        });
        let better = match &best {
            None => true,
            Some((_, fx, _)) => r.fx < *fx,
        };
        if better && r.fx.is_finite() {
            best = Some((r.x.clone(), r.fx, trace.clone()));
        }
    }

    let (u, _, _) = best.ok_or(ClassicalError::OptimizerFailed)?;
    let params = to_params(&u);
    let output = hw_filter(values, period, &params)?;
    Ok(HoltWintersFit {
        params,
        output,
        optimizer_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simple_params(alpha: f64, beta: f64, gamma: f64) -> HoltWintersParams {
        HoltWintersParams { alpha, beta, gamma }
    }

    #[test]
    fn two_steps_by_hand_with_period_two() {
        // y = [1, 3, 2, 4]; m = 2.
        // init: level = 2, slope = ((2+4)/2 - 2)/2 = 0.5, seasonals = [-1, 1].
        // t=2: one-step = 2 + 0.5 - 1 = 1.5, residual 0.5;
        //   level  = 0.5*(2-(-1)) + 0.5*(2.5)  = 2.75
        //   slope  = 0.5*(2.75-2) + 0.5*0.5    = 0.625
        //   s_2    = 0.5*(2-2-0.5) + 0.5*(-1)  = -0.75
        // t=3: one-step = 2.75 + 0.625 + 1 = 4.375, residual -0.375;
        //   level  = 0.5*(4-1) + 0.5*3.375     = 3.1875
        //   slope  = 0.5*(3.1875-2.75)+0.5*0.625 = 0.53125
        //   s_3    = 0.5*(4-2.75-0.625)+0.5*1  = 0.8125
        let out = hw_filter(&[1.0, 3.0, 2.0, 4.0], 2, &simple_params(0.5, 0.5, 0.5)).unwrap();
        assert_eq!(out.initial.level, 2.0);
        assert_eq!(out.initial.slope, 0.5);
        assert_eq!(out.initial.seasonals, vec![-1.0, 1.0]);
        assert_eq!(out.fitted, vec![1.5, 4.375]);
        assert_eq!(out.residuals, vec![0.5, -0.375]);
        assert!((out.state.level - 3.1875).abs() < 1e-15);
        assert!((out.state.slope - 0.53125).abs() < 1e-15);
        assert_eq!(out.state.seasonals, vec![-0.75, 0.8125]);
        assert!((out.sse - (0.25 + 0.140625)).abs() < 1e-15);
    }

    #[test]
    fn beta_zero_freezes_the_slope_bitwise() {
        let values: Vec<f64> = (0..48)
            .map(|t| 100.0 + 2.0 * t as f64 + [10.0, -5.0, 3.0, -8.0][t % 4] + (t % 7) as f64)
            .collect();
        let out = hw_filter(&values, 4, &simple_params(0.7, 0.0, 0.3)).unwrap();
        assert_eq!(out.state.slope, out.initial.slope);
    }

    #[test]
    fn boxes_reject_out_of_range_parameters_and_accept_closed_ends() {
        let values: Vec<f64> = (0..24).map(f64::from).collect();
        for bad in [
            simple_params(0.0, 0.1, 0.5),
            simple_params(1.0, 0.1, 0.5),
            simple_params(0.5, 1.0, 0.5),
            simple_params(0.5, -0.1, 0.5),
            simple_params(0.5, 0.1, 0.0),
            simple_params(0.5, 0.1, 1.1),
        ] {
            assert!(
                matches!(
                    hw_filter(&values, 12, &bad),
                    Err(ClassicalError::ParamOutOfBox { .. })
                ),
                "{bad:?} should be rejected"
            );
        }
        // Closed ends: beta = 0 and gamma = 1 are legal.
        assert!(hw_filter(&values, 12, &simple_params(0.5, 0.0, 1.0)).is_ok());
    }

    #[test]
    fn needs_two_full_cycles() {
        let values: Vec<f64> = (0..23).map(f64::from).collect();
        assert!(matches!(
            hw_filter(&values, 12, &simple_params(0.5, 0.1, 0.1)),
            Err(ClassicalError::NotEnoughData { needed: 24, got: 23 })
        ));
    }

    #[test]
    fn forecast_reads_seasonals_cyclically() {
        let state = HoltWintersState {
            level: 10.0,
            slope: 1.0,
            seasonals: (0..12).map(|i| i as f64 * 0.1).collect(),
        };
        let f = hw_forecast(&state, 26);
        assert_eq!(f.len(), 26);
        assert!((f[0] - (10.0 + 1.0 + 0.0)).abs() < 1e-12);
        assert!((f[11] - (10.0 + 12.0 + 1.1)).abs() < 1e-12);
        // h = 13 wraps back to the first stored seasonal.
        assert!((f[12] - (10.0 + 13.0 + 0.0)).abs() < 1e-12);
        // One full cycle apart differs by m * slope.
        for h in 0..14 {
            assert!((f[h + 12] - f[h] - 12.0).abs() < 1e-9);
        }
    }

    #[test]
    fn shifting_the_series_shifts_the_level_path_only() {
        let values: Vec<f64> = (0..60)
            .map(|t| 50.0 + 0.5 * t as f64 + [6.0, -2.0, -7.0, 3.0][t % 4] + ((t * 13) % 5) as f64)
            .collect();
        let shifted: Vec<f64> = values.iter().map(|v| v + 300.0).collect();
        let p = simple_params(0.6, 0.2, 0.4);
        let a = hw_filter(&values, 4, &p).unwrap();
        let b = hw_filter(&shifted, 4, &p).unwrap();
        for (ra, rb) in a.residuals.iter().zip(b.residuals.iter()) {
            assert!((ra - rb).abs() < 1e-9);
        }
        for (la, lb) in a.level_path.iter().zip(b.level_path.iter()) {
            assert!((lb - la - 300.0).abs() < 1e-9);
        }
        for (sa, sb) in a.state.seasonals.iter().zip(b.state.seasonals.iter()) {
            assert!((sa - sb).abs() < 1e-9);
        }
    }

    #[test]
    fn fit_is_deterministic_and_beats_the_default_start() {
        let values: Vec<f64> = (0..72)
            .map(|t| {
                200.0
                    + 1.5 * t as f64
                    + [30.0, 12.0, -8.0, -25.0, -20.0, -10.0, -5.0, 0.0, 4.0, 8.0, 6.0, 8.0][t % 12]
                    + ((t * 37) % 23) as f64 * 0.8
            })
            .collect();
        let fit1 = fit_holt_winters(&values, 12).unwrap();
        let fit2 = fit_holt_winters(&values, 12).unwrap();
        assert_eq!(fit1.params, fit2.params);
        assert_eq!(fit1.output.sse, fit2.output.sse);
        assert_eq!(fit1.optimizer_trace.len(), 4);

        let default_out = hw_filter(&values, 12, &simple_params(0.3, 0.1, 0.1)).unwrap();
        assert!(fit1.output.sse <= default_out.sse);
    }

    #[test]
    fn fit_tracks_a_clean_seasonal_trend_series() {
        // Deterministic trend + seasonality: after the states settle, the
        // one-step forecasts should be nearly exact.
        let season = [40.0, 25.0, 5.0, -15.0, -30.0, -35.0, -28.0, -18.0, -5.0, 10.0, 24.0, 27.0];
        let values: Vec<f64> = (0..96)
            .map(|t| 500.0 + 2.0 * t as f64 + season[t % 12])
            .collect();
        let fit = fit_holt_winters(&values, 12).unwrap();
        let tail = &fit.output.residuals[fit.output.residuals.len() - 24..];
        let tail_rmse = (tail.iter().map(|e| e * e).sum::<f64>() / 24.0).sqrt();
        assert!(tail_rmse < 1.0, "tail RMSE {tail_rmse}");
        let f = hw_forecast(&fit.output.state, 12);
        for (h, fh) in f.iter().enumerate() {
            let t = 96 + h;
            let truth = 500.0 + 2.0 * t as f64 + season[t % 12];
            assert!((fh - truth).abs() < 5.0, "h={h}: {fh} vs {truth}");
        }
    }
}
