use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::result::{ensure_finite, StatsError, TestResult};

/// Goldfeld-Quandt heteroscedasticity test on a time-ordered residual
/// sequence, split into halves.
///
/// Each half's variance is taken about its own mean (constant-mean segments);
/// with an odd count the middle observation is dropped so both halves have
/// equal size. The statistic is the larger variance over the smaller, and the
/// p-value is two-sided: 2 * P(F > observed) with the numerator df belonging
/// to the larger-variance half.
pub fn goldfeld_quandt(residuals: &[f64]) -> Result<TestResult, StatsError> {
    const TEST: &str = "goldfeld_quandt";
    ensure_finite(TEST, residuals)?;
    let n = residuals.len();
    if n < 6 {
        return Err(StatsError::TooFew {
            test: TEST,
            needed: 6,
            got: n,
        });
    }

    let half = n / 2;
    let first = &residuals[..half];
    let second = &residuals[n - half..];

    let var = |xs: &[f64]| -> f64 {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (xs.len() - 1) as f64
    };
    let v1 = var(first);
    let v2 = var(second);
    if v1 == 0.0 && v2 == 0.0 {
        return Err(StatsError::Degenerate { test: TEST });
    }
    if v1 == 0.0 || v2 == 0.0 {
        // One half is exactly constant: infinitely strong evidence.
        return Ok(TestResult::new(TEST, f64::INFINITY, 0.0)
            .with_aux("half_size", half as f64)
            .with_aux("second_half_larger", if v2 >= v1 { 1.0 } else { 0.0 }));
    }

    let (larger, smaller) = if v2 >= v1 { (v2, v1) } else { (v1, v2) };
    let f = larger / smaller;
    let df = (half - 1) as f64;
    let dist = FisherSnedecor::new(df, df).expect("positive dfs");
    let p = (2.0 * (1.0 - dist.cdf(f))).clamp(0.0, 1.0);

    Ok(TestResult::new(TEST, f, p)
        .with_df(df)
        .with_aux("half_size", half as f64)
        .with_aux("first_half_variance", v1)
        .with_aux("second_half_variance", v2)
        .with_aux("second_half_larger", if v2 >= v1 { 1.0 } else { 0.0 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
        (0..n)
            .map(|_| ((0..12).map(|_| rng.gen::<f64>()).sum::<f64>() - 6.0) * scale)
            .collect()
    }

    #[test]
    fn hand_computed_ratio() {
        // First half [1,2,3]: var 1. Second half [10,14,18]: var 16.
        let r = goldfeld_quandt(&[1.0, 2.0, 3.0, 10.0, 14.0, 18.0]).unwrap();
        assert!((r.statistic - 16.0).abs() < 1e-12);
        assert_eq!(r.aux["second_half_larger"], 1.0);
        assert_eq!(r.df, Some(2.0));
    }

    #[test]
    fn odd_length_drops_the_middle_observation() {
        let r = goldfeld_quandt(&[1.0, 2.0, 3.0, 99.0, 10.0, 14.0, 18.0]).unwrap();
        // Same halves as the even case above; the 99 in the middle is unused.
        assert!((r.statistic - 16.0).abs() < 1e-12);
        assert_eq!(r.aux["half_size"], 3.0);
    }

    #[test]
    fn statistic_is_symmetric_in_the_halves() {
        let a = goldfeld_quandt(&[1.0, 2.0, 3.0, 10.0, 14.0, 18.0]).unwrap();
        let b = goldfeld_quandt(&[10.0, 14.0, 18.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(a.statistic, b.statistic);
        assert_eq!(a.p_value, b.p_value);
        assert_eq!(b.aux["second_half_larger"], 0.0);
    }

    #[test]
    fn homoscedastic_noise_mostly_passes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4751);
        let sims = 500;
        let mut pass = 0;
        for _ in 0..sims {
            let x = noise(&mut rng, 200, 1.0);
            if goldfeld_quandt(&x).unwrap().p_value > 0.05 {
                pass += 1;
            }
        }
        assert!(pass >= 450, "only {pass}/{sims} above 0.05");
    }

    #[test]
    fn null_rejection_rate_is_calibrated() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4752);
        let sims = 2000;
        let mut rejections = 0;
        for _ in 0..sims {
            let x = noise(&mut rng, 200, 1.0);
            if goldfeld_quandt(&x).unwrap().p_value < 0.05 {
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
    fn doubled_variance_is_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4753);
        let sims = 500;
        let mut detected = 0;
        for _ in 0..sims {
            let mut x = noise(&mut rng, 200, 1.0);
            x.extend(noise(&mut rng, 200, 2.0_f64.sqrt()));
            if goldfeld_quandt(&x).unwrap().p_value < 0.05 {
                detected += 1;
            }
        }
        assert!(detected as f64 / sims as f64 >= 0.95, "{detected}/{sims}");
    }

    #[test]
    fn degenerate_and_short_inputs_error() {
        assert!(matches!(
            goldfeld_quandt(&[0.0; 10]),
            Err(StatsError::Degenerate { .. })
        ));
        assert!(matches!(
            goldfeld_quandt(&[1.0, 2.0]),
            Err(StatsError::TooFew { .. })
        ));
        let r = goldfeld_quandt(&[5.0, 5.0, 5.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.p_value, 0.0);
        assert!(r.statistic.is_infinite());
    }
}
