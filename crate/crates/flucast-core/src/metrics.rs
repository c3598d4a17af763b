use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// Floor applied to relative errors inside the geometric mean, guarding the
/// logarithm against exact hits and zero denominators.
pub const GMRAE_FLOOR: f64 = 1e-12;

fn check_pair(actual: &[f64], predicted: &[f64]) -> Result<(), CoreError> {
    if actual.is_empty() {
        return Err(CoreError::EmptySeries);
    }
    if actual.len() != predicted.len() {
        return Err(CoreError::LengthMismatch {
            actual: actual.len(),
            predicted: predicted.len(),
        });
    }
    Ok(())
}

pub fn mse(actual: &[f64], predicted: &[f64]) -> Result<f64, CoreError> {
    check_pair(actual, predicted)?;
    let n = actual.len() as f64;
    Ok(actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p) * (a - p))
        .sum::<f64>()
        / n)
}

pub fn mae(actual: &[f64], predicted: &[f64]) -> Result<f64, CoreError> {
    check_pair(actual, predicted)?;
    let n = actual.len() as f64;
    Ok(actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p).abs())
        .sum::<f64>()
        / n)
}

/// Geometric mean relative absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gmrae {
    /// exp(mean of log relative errors) after flooring.
    pub value: f64,
    /// How many terms hit the floor (zero denominators or near-exact hits).
    pub floored_terms: usize,
    /// True when every term was floored; `value` is then the floor itself and
    /// carries no information.
    pub undefined: bool,
}

/// Relative errors `|(a - p)/a|` floored at `GMRAE_FLOOR` before the log
/// (both for near-zero numerators and near-zero denominators), aggregated by
/// geometric mean. The floored-term count is reported alongside the value.
pub fn gmrae(actual: &[f64], predicted: &[f64]) -> Result<Gmrae, CoreError> {
    check_pair(actual, predicted)?;
    let mut floored = 0usize;
    let mut log_sum = 0.0;
    for (&a, &p) in actual.iter().zip(predicted) {
        let denom = a.abs().max(GMRAE_FLOOR);
        let mut r = (a - p).abs() / denom;
        if r < GMRAE_FLOOR || a.abs() < GMRAE_FLOOR {
            r = r.max(GMRAE_FLOOR);
            floored += 1;
        }
        log_sum += r.max(GMRAE_FLOOR).ln();
    }
    let value = (log_sum / actual.len() as f64).exp();
    Ok(Gmrae {
        value,
        floored_terms: floored,
        undefined: floored == actual.len(),
    })
}

/// Theil's U1 inequality coefficient:
/// RMSE / (RMS(actual) + RMS(predicted)), bounded in [0, 1].
pub fn theil_u1(actual: &[f64], predicted: &[f64]) -> Result<f64, CoreError> {
    check_pair(actual, predicted)?;
    let n = actual.len() as f64;
    let rms = |xs: &[f64]| (xs.iter().map(|x| x * x).sum::<f64>() / n).sqrt();
    let rmse = mse(actual, predicted)?.sqrt();
    let denom = rms(actual) + rms(predicted);
    if denom == 0.0 {
        return Err(CoreError::DegenerateMetric(
            "theil_u1: actual and predicted are both identically zero",
        ));
    }
    Ok(rmse / denom)
}

/// Which scale a metric block was computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleTag {
    Original,
    Normalized,
}

/// The four accuracy metrics for one forecast, tagged with the scale they
/// were computed on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub scale: ScaleTag,
    pub mse: f64,
    pub mae: f64,
    /// None when every relative-error term was floored (degenerate).
    pub gmrae: Option<f64>,
    pub gmrae_floored_terms: usize,
    pub theil_u1: f64,
}

pub fn metric_report(
    actual: &[f64],
    predicted: &[f64],
    scale: ScaleTag,
) -> Result<MetricReport, CoreError> {
    let g = gmrae(actual, predicted)?;
    Ok(MetricReport {
        scale,
        mse: mse(actual, predicted)?,
        mae: mae(actual, predicted)?,
        gmrae: if g.undefined { None } else { Some(g.value) },
        gmrae_floored_terms: g.floored_terms,
        theil_u1: theil_u1(actual, predicted)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_computed_values() {
        let a = [1.0, 2.0, 3.0];
        let p = [1.0, 1.0, 5.0];
        // Errors: 0, 1, -2.
        assert!((mse(&a, &p).unwrap() - 5.0 / 3.0).abs() < 1e-12);
        assert!((mae(&a, &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_forecast_floors_every_gmrae_term() {
        let a = [1.0, 2.0, 3.0];
        let g = gmrae(&a, &a).unwrap();
        assert_eq!(g.floored_terms, 3);
        assert!(g.undefined);
        assert!((g.value - GMRAE_FLOOR).abs() < 1e-24);
        assert!((mse(&a, &a).unwrap()).abs() == 0.0);
        assert_eq!(theil_u1(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn all_ones_relative_error_gives_gmrae_one() {
        let a = [2.0, 4.0, 8.0];
        let p = [0.0, 0.0, 0.0];
        let g = gmrae(&a, &p).unwrap();
        assert_eq!(g.floored_terms, 0);
        assert!(!g.undefined);
        assert!((g.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gmrae_is_the_geometric_mean() {
        let a = [1.0, 1.0];
        let p = [0.5, 1.0 - 2.0]; // relative errors 0.5 and 2.0
        let g = gmrae(&a, &p).unwrap();
        assert!((g.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn theil_is_zero_for_perfect_and_bounded_by_one() {
        let a = [3.0, -1.0, 4.0];
        let p = [-2.0, 7.0, 0.5];
        let u = theil_u1(&a, &p).unwrap();
        assert!((0.0..=1.0).contains(&u));
        assert!(matches!(
            theil_u1(&[0.0, 0.0], &[0.0, 0.0]),
            Err(CoreError::DegenerateMetric(_))
        ));
    }

    #[test]
    fn length_mismatch_is_rejected() {
        assert!(matches!(
            mse(&[1.0], &[1.0, 2.0]),
            Err(CoreError::LengthMismatch { actual: 1, predicted: 2 })
        ));
    }

    #[test]
    fn report_carries_all_four_metrics() {
        let a = [10.0, 20.0, 30.0, 40.0];
        let p = [12.0, 18.0, 33.0, 39.0];
        let r = metric_report(&a, &p, ScaleTag::Original).unwrap();
        assert_eq!(r.scale, ScaleTag::Original);
        assert!(r.mae * r.mae <= r.mse + 1e-12);
        assert!(r.gmrae.is_some());
        assert_eq!(r.gmrae_floored_terms, 0);
    }

    proptest! {
        #[test]
        fn mae_squared_never_exceeds_mse(
            pairs in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..60)
        ) {
            let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let p: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let mae = mae(&a, &p).unwrap();
            let mse = mse(&a, &p).unwrap();
            prop_assert!(mae * mae <= mse * (1.0 + 1e-12) + 1e-12);
        }

        #[test]
        fn theil_stays_in_unit_interval(
            pairs in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 2..60)
        ) {
            let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let p: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            prop_assume!(a.iter().any(|v| *v != 0.0) || p.iter().any(|v| *v != 0.0));
            let u = theil_u1(&a, &p).unwrap();
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&u));
        }
    }
}
