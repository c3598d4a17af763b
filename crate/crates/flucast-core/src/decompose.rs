use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::series::TimeSeries;

/// Result of a classical additive decomposition.
///
/// `trend` and `residual` are undefined (None) for half a window at each end,
/// where the centered moving average has no support. Where all three parts are
/// defined, `trend + seasonal + residual` reproduces the input exactly, since
/// the residual is defined as the remainder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub period: usize,
    pub trend: Vec<Option<f64>>,
    pub seasonal: Vec<f64>,
    pub residual: Vec<Option<f64>>,
    /// One centered index per season position (position `t % period`); sums to
    /// zero up to rounding.
    pub seasonal_indices: Vec<f64>,
}

/// Classical additive decomposition with a centered moving-average trend.
///
/// For an even period `m` the trend is the 2-by-m moving average (half weight
/// on the two outermost points); for odd `m` a plain centered m-point average.
/// Seasonal indices are per-position means of the detrended series, centered
/// to sum to zero.
pub fn classical_additive_decompose(
    values: &[f64],
    period: usize,
) -> Result<Decomposition, CoreError> {
    if period < 2 {
        return Err(CoreError::BadPeriod(period));
    }
    let n = values.len();
    if n < 2 * period {
        return Err(CoreError::TooShort {
            needed: 2 * period,
            got: n,
        });
    }

    let half = period / 2;
    let mut trend: Vec<Option<f64>> = vec![None; n];
    if period % 2 == 0 {
        for t in half..n - half {
            let mut acc = 0.5 * values[t - half] + 0.5 * values[t + half];
            for j in (t - half + 1)..(t + half) {
                acc += values[j];
            }
            trend[t] = Some(acc / period as f64);
        }
    } else {
        for t in half..n - half {
            let mut acc = 0.0;
            for j in (t - half)..=(t + half) {
                acc += values[j];
            }
            trend[t] = Some(acc / period as f64);
        }
    }

    // Per-position means of the detrended series.
    let mut sums = vec![0.0; period];
    let mut counts = vec![0usize; period];
    for t in 0..n {
        if let Some(tr) = trend[t] {
            sums[t % period] += values[t] - tr;
            counts[t % period] += 1;
        }
    }
    let mut indices: Vec<f64> = sums
        .iter()
        .zip(counts.iter())
        .map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    let center = indices.iter().sum::<f64>() / period as f64;
    for v in indices.iter_mut() {
        *v -= center;
    }

    let seasonal: Vec<f64> = (0..n).map(|t| indices[t % period]).collect();
    let residual: Vec<Option<f64>> = (0..n)
        .map(|t| trend[t].map(|tr| values[t] - tr - seasonal[t]))
        .collect();

    Ok(Decomposition {
        period,
        trend,
        seasonal,
        residual,
        seasonal_indices: indices,
    })
}

/// One calendar year of observations, for seasonal ("season plot") overlays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeasonTrace {
    pub year: i32,
    /// Calendar month (1-based) of the first value in `values`.
    pub start_month: u8,
    pub values: Vec<f64>,
}

/// Groups a monthly series by calendar year. Partial first/last years yield
/// shorter traces.
pub fn season_plot_data(series: &TimeSeries) -> Vec<SeasonTrace> {
    let mut traces: Vec<SeasonTrace> = Vec::new();
    for (month, &value) in series.months().zip(series.values().iter()) {
        match traces.last_mut() {
            Some(tr) if tr.year == month.year => tr.values.push(value),
            _ => traces.push(SeasonTrace {
                year: month.year,
                start_month: month.month,
                values: vec![value],
            }),
        }
    }
    traces
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::month::Month;

    fn seasonal_pattern() -> Vec<f64> {
        // Zero-sum pattern with a clear winter peak.
        vec![
            8.0, 5.0, 1.0, -4.0, -7.0, -9.0, -8.0, -6.0, -2.0, 3.0, 9.0, 10.0,
        ]
    }

    #[test]
    fn recovers_a_pure_seasonal_pattern_over_a_constant() {
        let s = seasonal_pattern();
        let values: Vec<f64> = (0..48).map(|t| 10.0 + s[t % 12]).collect();
        let d = classical_additive_decompose(&values, 12).unwrap();
        for (got, want) in d.seasonal_indices.iter().zip(s.iter()) {
            assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        }
        for r in d.residual.iter().flatten() {
            assert!(r.abs() < 1e-6);
        }
        for tr in d.trend.iter().flatten() {
            assert!((tr - 10.0).abs() < 1e-9);
        }
    }

    #[test]
    fn trend_and_residual_edges_are_undefined() {
        let values: Vec<f64> = (0..36).map(f64::from).collect();
        let d = classical_additive_decompose(&values, 12).unwrap();
        for t in 0..6 {
            assert!(d.trend[t].is_none());
            assert!(d.residual[t].is_none());
        }
        for t in 30..36 {
            assert!(d.trend[t].is_none());
            assert!(d.residual[t].is_none());
        }
        assert!(d.trend[6].is_some());
        assert!(d.trend[29].is_some());
    }

    #[test]
    fn components_sum_back_to_the_series_where_defined() {
        let s = seasonal_pattern();
        let values: Vec<f64> = (0..60)
            .map(|t| 50.0 + 0.8 * t as f64 + s[t % 12] + ((t * 37) % 11) as f64 * 0.3)
            .collect();
        let d = classical_additive_decompose(&values, 12).unwrap();
        let mut checked = 0;
        for t in 0..values.len() {
            if let (Some(tr), Some(res)) = (d.trend[t], d.residual[t]) {
                assert!((tr + d.seasonal[t] + res - values[t]).abs() < 1e-9);
                checked += 1;
            }
        }
        assert_eq!(checked, 60 - 12);
    }

    #[test]
    fn seasonal_indices_sum_to_zero() {
        let values: Vec<f64> = (0..50)
            .map(|t| 100.0 + (t as f64 * 0.9).sin() * 30.0 + (t % 12) as f64)
            .collect();
        let d = classical_additive_decompose(&values, 12).unwrap();
        assert!(d.seasonal_indices.iter().sum::<f64>().abs() < 1e-9);
    }

    #[test]
    fn linear_trend_slope_is_recovered() {
        // Least-squares slope of the defined trend segment should match the
        // generating slope.
        let slope = 1.7;
        let s = seasonal_pattern();
        let values: Vec<f64> = (0..72).map(|t| 5.0 + slope * t as f64 + s[t % 12]).collect();
        let d = classical_additive_decompose(&values, 12).unwrap();
        let pts: Vec<(f64, f64)> = d
            .trend
            .iter()
            .enumerate()
            .filter_map(|(t, tr)| tr.map(|v| (t as f64, v)))
            .collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let beta = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<f64>();
        assert!((beta - slope).abs() < 1e-6, "slope {beta}");
    }

    #[test]
    fn adding_a_constant_shifts_only_the_trend() {
        let s = seasonal_pattern();
        let base: Vec<f64> = (0..48)
            .map(|t| 40.0 + 0.3 * t as f64 + s[t % 12] + ((t * 13) % 7) as f64)
            .collect();
        let shifted: Vec<f64> = base.iter().map(|v| v + 250.0).collect();
        let d0 = classical_additive_decompose(&base, 12).unwrap();
        let d1 = classical_additive_decompose(&shifted, 12).unwrap();
        for (a, b) in d0.seasonal_indices.iter().zip(d1.seasonal_indices.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
        for t in 0..base.len() {
            match (d0.trend[t], d1.trend[t]) {
                (Some(a), Some(b)) => assert!((b - a - 250.0).abs() < 1e-9),
                (None, None) => {}
                _ => panic!("trend definedness changed"),
            }
            match (d0.residual[t], d1.residual[t]) {
                (Some(a), Some(b)) => assert!((a - b).abs() < 1e-9),
                (None, None) => {}
                _ => panic!("residual definedness changed"),
            }
        }
    }

    #[test]
    fn seasonal_indices_rotate_with_the_starting_position() {
        let s = seasonal_pattern();
        let values: Vec<f64> = (0..48).map(|t| 10.0 + s[t % 12]).collect();
        let rotated: Vec<f64> = (0..48).map(|t| 10.0 + s[(t + 3) % 12]).collect();
        let d0 = classical_additive_decompose(&values, 12).unwrap();
        let d1 = classical_additive_decompose(&rotated, 12).unwrap();
        for j in 0..12 {
            assert!((d1.seasonal_indices[j] - d0.seasonal_indices[(j + 3) % 12]).abs() < 1e-6);
        }
    }

    #[test]
    fn needs_two_full_cycles() {
        let values = vec![1.0; 23];
        assert!(matches!(
            classical_additive_decompose(&values, 12),
            Err(CoreError::TooShort { needed: 24, got: 23 })
        ));
    }

    #[test]
    fn season_plot_groups_by_calendar_year() {
        let start = Month { year: 2020, month: 12 };
        let ts = TimeSeries::new(start, (0..13).map(f64::from).collect(), 12).unwrap();
        let traces = season_plot_data(&ts);
        assert_eq!(traces.len(), 2);
        assert_eq!(traces[0].year, 2020);
        assert_eq!(traces[0].start_month, 12);
        assert_eq!(traces[0].values, vec![0.0]);
        assert_eq!(traces[1].year, 2021);
        assert_eq!(traces[1].start_month, 1);
        assert_eq!(traces[1].values.len(), 12);
    }
}
