use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::result::{ensure_finite, StatsError, TestResult};

/// Which portmanteau statistic to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PortmanteauVariant {
    /// Q = n(n+2) * sum r_k^2 / (n-k) — the small-sample-corrected form.
    LjungBox,
    /// Q = n * sum r_k^2 — the original uncorrected form.
    BoxPierce,
}

impl PortmanteauVariant {
    fn name(self) -> &'static str {
        match self {
            PortmanteauVariant::LjungBox => "ljung_box",
            PortmanteauVariant::BoxPierce => "box_pierce",
        }
    }
}

/// Ljung-Box / Box-Pierce residual-whiteness test over lags 1..=max_lag.
///
/// `fitdf` is subtracted from the degrees of freedom to account for
/// parameters estimated when producing the residuals; pass 0 for a raw
/// series. Autocorrelations are computed about the sample mean.
pub fn ljung_box(
    residuals: &[f64],
    max_lag: usize,
    fitdf: usize,
    variant: PortmanteauVariant,
) -> Result<TestResult, StatsError> {
    ensure_finite("ljung_box", residuals)?;
    let n = residuals.len();
    if max_lag == 0 || max_lag >= n {
        return Err(StatsError::BadLag {
            test: "ljung_box",
            lag: max_lag,
            len: n,
        });
    }
    if fitdf >= max_lag {
        return Err(StatsError::BadFitDf { fitdf, max_lag });
    }

    let nf = n as f64;
    let mean = residuals.iter().sum::<f64>() / nf;
    let e: Vec<f64> = residuals.iter().map(|v| v - mean).collect();
    let denom: f64 = e.iter().map(|v| v * v).sum();
    if denom == 0.0 {
        return Err(StatsError::Degenerate { test: "ljung_box" });
    }

    let mut q = 0.0;
    for k in 1..=max_lag {
        let mut num = 0.0;
        for t in k..n {
            num += e[t] * e[t - k];
        }
        let r = num / denom;
        match variant {
            PortmanteauVariant::LjungBox => q += r * r / (nf - k as f64),
            PortmanteauVariant::BoxPierce => q += r * r,
        }
    }
    q *= match variant {
        PortmanteauVariant::LjungBox => nf * (nf + 2.0),
        PortmanteauVariant::BoxPierce => nf,
    };

    let df = (max_lag - fitdf) as f64;
    let chi2 = ChiSquared::new(df).expect("positive df");
    let p = (1.0 - chi2.cdf(q)).clamp(0.0, 1.0);

    Ok(TestResult::new(variant.name(), q, p)
        .with_df(df)
        .with_aux("max_lag", max_lag as f64)
        .with_aux("fitdf", fitdf as f64)
        .with_aux("n", nf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| (0..12).map(|_| rng.gen::<f64>()).sum::<f64>() - 6.0)
            .collect()
    }

    #[test]
    fn alternating_signs_give_lag_one_autocorrelation_near_minus_one() {
        let n = 100;
        let x: Vec<f64> = (0..n).map(|t| if t % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let r = ljung_box(&x, 1, 0, PortmanteauVariant::LjungBox).unwrap();
        // r1 = -(n-1)/n, Q = n(n+2) * r1^2/(n-1) = (n+2)(n-1)/n
        let nf = n as f64;
        let expected = (nf + 2.0) * (nf - 1.0) / nf;
        assert!((r.statistic - expected).abs() < 1e-9);
        assert!(r.p_value < 1e-6);
    }

    #[test]
    fn box_pierce_differs_from_ljung_box_by_the_small_sample_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = noise(&mut rng, 60);
        let lb = ljung_box(&x, 5, 0, PortmanteauVariant::LjungBox).unwrap();
        let bp = ljung_box(&x, 5, 0, PortmanteauVariant::BoxPierce).unwrap();
        assert!(bp.statistic < lb.statistic);
        assert_eq!(lb.test, "ljung_box");
        assert_eq!(bp.test, "box_pierce");
    }

    #[test]
    fn fitdf_reduces_degrees_of_freedom() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = noise(&mut rng, 200);
        let r0 = ljung_box(&x, 12, 0, PortmanteauVariant::LjungBox).unwrap();
        let r4 = ljung_box(&x, 12, 4, PortmanteauVariant::LjungBox).unwrap();
        assert_eq!(r0.df, Some(12.0));
        assert_eq!(r4.df, Some(8.0));
        assert_eq!(r0.statistic, r4.statistic);
        assert!(r4.p_value < r0.p_value); // same Q, fewer df
    }

    #[test]
    fn parameter_bounds_are_enforced() {
        let x = vec![1.0, 2.0, 3.0, 4.0];
        assert!(matches!(
            ljung_box(&x, 4, 0, PortmanteauVariant::LjungBox),
            Err(StatsError::BadLag { .. })
        ));
        assert!(matches!(
            ljung_box(&x, 3, 3, PortmanteauVariant::LjungBox),
            Err(StatsError::BadFitDf { fitdf: 3, max_lag: 3 })
        ));
    }

    #[test]
    fn white_noise_passes_in_most_simulations() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4c42);
        let sims = 500;
        let mut pass = 0;
        for _ in 0..sims {
            let x = noise(&mut rng, 300);
            let r = ljung_box(&x, 24, 0, PortmanteauVariant::LjungBox).unwrap();
            if r.p_value > 0.05 {
                pass += 1;
            }
        }
        assert!(pass >= 450, "only {pass}/{sims} above 0.05");
    }

    #[test]
    fn null_rejection_rate_is_calibrated() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4c43);
        let sims = 2000;
        let mut rejections = 0;
        for _ in 0..sims {
            let x = noise(&mut rng, 200);
            if ljung_box(&x, 10, 0, PortmanteauVariant::LjungBox)
                .unwrap()
                .p_value
                < 0.05
            {
                rejections += 1;
            }
        }
        let rate = rejections as f64 / sims as f64;
        assert!(
            (rate - 0.05).abs() <= 0.02,
            "null rejection rate {rate} outside 0.05 +/- 0.02"
        );
    }

    #[test]
    fn ar1_correlation_is_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4c44);
        let mut detected = 0;
        let sims = 200;
        for _ in 0..sims {
            let shocks = noise(&mut rng, 300);
            let mut x = vec![0.0; 300];
            for t in 1..300 {
                x[t] = 0.8 * x[t - 1] + shocks[t];
            }
            let r = ljung_box(&x, 10, 0, PortmanteauVariant::LjungBox).unwrap();
            if r.p_value < 0.01 {
                detected += 1;
            }
        }
        assert!(detected >= 195, "power too low: {detected}/{sims}");
    }
}
