use statrs::distribution::{ContinuousCDF, Normal};

use crate::result::{ensure_finite, StatsError, TestResult};

/// Mann-Kendall monotone-trend test.
///
/// The reported statistic is Kendall's tau (tie-adjusted); `aux` carries the
/// raw S, its tie-corrected variance, and the continuity-corrected z. The
/// p-value is two-sided normal.
pub fn mann_kendall(values: &[f64]) -> Result<TestResult, StatsError> {
    const TEST: &str = "mann_kendall";
    ensure_finite("mann_kendall", values)?;
    let n = values.len();
    if n < 4 {
        return Err(StatsError::TooFew {
            test: TEST,
            needed: 4,
            got: n,
        });
    }

    let mut s: i64 = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = values[j] - values[i];
            if d > 0.0 {
                s += 1;
            } else if d < 0.0 {
                s -= 1;
            }
        }
    }

    // Tie groups in the data (time indices are never tied).
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let mut tie_sizes: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        tie_sizes.push(j - i + 1);
        i = j + 1;
    }
    if tie_sizes.len() == 1 {
        return Err(StatsError::Degenerate { test: TEST });
    }

    let nf = n as f64;
    let tie_var: f64 = tie_sizes
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * (t - 1.0) * (2.0 * t + 5.0)
        })
        .sum();
    let var_s = (nf * (nf - 1.0) * (2.0 * nf + 5.0) - tie_var) / 18.0;

    // Kendall's tau-b style denominator: pairs not tied in the data times
    // pairs not tied in time (time contributes no ties).
    let n0 = nf * (nf - 1.0) / 2.0;
    let n1: f64 = tie_sizes
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * (t - 1.0) / 2.0
        })
        .sum();
    let tau = s as f64 / ((n0 - n1).sqrt() * n0.sqrt());

    // Continuity-corrected normal approximation.
    let z = if s > 0 {
        (s as f64 - 1.0) / var_s.sqrt()
    } else if s < 0 {
        (s as f64 + 1.0) / var_s.sqrt()
    } else {
        0.0
    };
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let p = (2.0 * (1.0 - normal.cdf(z.abs()))).clamp(0.0, 1.0);

    Ok(TestResult::new(TEST, tau, p)
        .with_aux("s", s as f64)
        .with_aux("var_s", var_s)
        .with_aux("z", z)
        .with_aux("n", nf)
        .with_aux(
            "tied_groups",
            tie_sizes.iter().filter(|&&t| t > 1).count() as f64,
        ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn strictly_increasing_gives_tau_one() {
        let values: Vec<f64> = (0..20).map(f64::from).collect();
        let r = mann_kendall(&values).unwrap();
        assert!((r.statistic - 1.0).abs() < 1e-12);
        assert!(r.p_value < 1e-3);
        assert_eq!(r.aux["s"], 190.0); // 20*19/2 concordant pairs
    }

    #[test]
    fn strictly_decreasing_gives_tau_minus_one() {
        let values: Vec<f64> = (0..20).rev().map(f64::from).collect();
        let r = mann_kendall(&values).unwrap();
        assert!((r.statistic + 1.0).abs() < 1e-12);
        assert!(r.p_value < 1e-3);
    }

    #[test]
    fn hand_computed_small_case_with_ties() {
        // x = [1, 3, 2, 3]: pairs (1,3)+ (1,2)+ (1,3)+ (3,2)- (3,3)0 (2,3)+
        // => S = 3. Ties: one group of size 2.
        // var = [4*3*13 - 2*1*9]/18 = (156 - 18)/18 = 7.6667
        // tau = 3 / (sqrt(6-1)*sqrt(6)) = 3/sqrt(30) = 0.5477
        let r = mann_kendall(&[1.0, 3.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.aux["s"], 3.0);
        assert!((r.aux["var_s"] - 138.0 / 18.0).abs() < 1e-12);
        assert!((r.statistic - 3.0 / 30.0_f64.sqrt()).abs() < 1e-12);
        // z = (3-1)/sqrt(7.667) = 0.7223 -> p = 0.4701
        assert!((r.p_value - 0.47014).abs() < 1e-4);
    }

    #[test]
    fn constant_series_is_degenerate() {
        assert!(matches!(
            mann_kendall(&[2.0; 10]),
            Err(StatsError::Degenerate { .. })
        ));
    }

    #[test]
    fn null_rejection_rate_is_calibrated() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4d4b);
        let mut rejections = 0;
        let sims = 2000;
        for _ in 0..sims {
            let values: Vec<f64> = (0..100).map(|_| rng.gen::<f64>() - 0.5).collect();
            let r = mann_kendall(&values).unwrap();
            if r.p_value < 0.05 {
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
    fn detects_a_weak_trend_in_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut detected = 0;
        for _ in 0..200 {
            let values: Vec<f64> = (0..150)
                .map(|t| t as f64 * 0.02 + rng.gen::<f64>() * 2.0 - 1.0)
                .collect();
            if mann_kendall(&values).unwrap().p_value < 0.05 {
                detected += 1;
            }
        }
        assert!(detected >= 180, "power too low: {detected}/200");
    }
}
