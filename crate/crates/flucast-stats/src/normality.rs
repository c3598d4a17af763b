use statrs::distribution::{ContinuousCDF, Normal};

use crate::result::{ensure_finite, StatsError, TestResult};

/// Lilliefors test of normality (Kolmogorov-Smirnov with estimated mean and
/// variance).
///
/// The statistic is the sup-distance between the empirical CDF and the normal
/// CDF at the sample mean/sd. The p-value uses the Dallal-Wilkinson
/// approximation for the small-p region and the Stephens modified-statistic
/// fit when that approximation reports p > 0.1; the final value is clamped to
/// [1e-4, 1], and the clamp bounds are recorded in `aux`.
pub fn lilliefors(values: &[f64]) -> Result<TestResult, StatsError> {
    const TEST: &str = "lilliefors";
    ensure_finite(TEST, values)?;
    let n = values.len();
    if n < 5 {
        return Err(StatsError::TooFew {
            test: TEST,
            needed: 5,
            got: n,
        });
    }

    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0);
    if var == 0.0 {
        return Err(StatsError::Degenerate { test: TEST });
    }
    let sd = var.sqrt();

    let mut z: Vec<f64> = values.iter().map(|v| (v - mean) / sd).collect();
    z.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));

    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut d = 0.0f64;
    for (i, &zi) in z.iter().enumerate() {
        let cdf = normal.cdf(zi);
        let d_plus = (i + 1) as f64 / nf - cdf;
        let d_minus = cdf - i as f64 / nf;
        d = d.max(d_plus).max(d_minus);
    }

    let p = lilliefors_p(d, n).clamp(1e-4, 1.0);

    Ok(TestResult::new(TEST, d, p)
        .with_aux("n", nf)
        .with_aux("p_clamp_low", 1e-4)
        .with_aux("p_clamp_high", 1.0))
}

/// Dallal-Wilkinson (1986) analytic approximation, with the Stephens
/// modified-statistic polynomial taking over where the former is only
/// reliable for small p (> 0.1 region).
fn lilliefors_p(d: f64, n: usize) -> f64 {
    let nf = n as f64;
    let (kd, nd) = if n > 100 {
        (d * (nf / 100.0).powf(0.49), 100.0)
    } else {
        (d, nf)
    };
    let p = (-7.01256 * kd * kd * (nd + 2.78019)
        + 2.99587 * kd * (nd + 2.78019).sqrt()
        - 0.122119
        + 0.974598 / nd.sqrt()
        + 1.67997 / nd)
        .exp();
    if p <= 0.1 {
        return p;
    }

    // Stephens' modified statistic, fitted piecewise.
    let kk = (nf.sqrt() - 0.01 + 0.85 / nf.sqrt()) * d;
    if kk <= 0.302 {
        1.0
    } else if kk <= 0.5 {
        2.76773 - 19.828315 * kk + 80.709644 * kk * kk - 138.55152 * kk.powi(3)
            + 81.218052 * kk.powi(4)
    } else if kk <= 0.9 {
        -4.901232 + 40.662806 * kk - 97.490286 * kk * kk + 94.029866 * kk.powi(3)
            - 32.355711 * kk.powi(4)
    } else if kk <= 1.31 {
        6.198765 - 19.558097 * kk + 23.186922 * kk * kk - 12.234627 * kk.powi(3)
            + 2.423045 * kk.powi(4)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn normalish(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| (0..12).map(|_| rng.gen::<f64>()).sum::<f64>() - 6.0)
            .collect()
    }

    #[test]
    fn d_statistic_matches_a_hand_computation() {
        // Five points; standardized values put the largest ECDF gap at the
        // smallest observation. Checked against a by-hand evaluation.
        let x = [1.0, 2.0, 3.0, 4.0, 10.0];
        let r = lilliefors(&x).unwrap();
        // mean 4, sd sqrt(12.5); z = (-0.8485, -0.5657, -0.2828, 0, 1.6971)
        // D+ at first point: 0.2 - Phi(-0.8485) = 0.2 - 0.1981 = 0.0019
        // D- at fourth point: Phi(0) - 3/5 = -0.1 ; D+ there: 0.8 - 0.5 = 0.3
        assert!((r.statistic - 0.3).abs() < 1e-3, "D = {}", r.statistic);
    }

    #[test]
    fn clamps_and_records_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // Strongly bimodal: +/- 10 with tiny jitter.
        let x: Vec<f64> = (0..300)
            .map(|i| if i % 2 == 0 { 10.0 } else { -10.0 } + rng.gen::<f64>() * 0.01)
            .collect();
        let r = lilliefors(&x).unwrap();
        assert_eq!(r.p_value, 1e-4);
        assert_eq!(r.aux["p_clamp_low"], 1e-4);
        assert_eq!(r.aux["p_clamp_high"], 1.0);
    }

    #[test]
    fn normal_samples_mostly_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4c49);
        let sims = 500;
        let mut pass = 0;
        for _ in 0..sims {
            let x = normalish(&mut rng, 200);
            if lilliefors(&x).unwrap().p_value > 0.05 {
                pass += 1;
            }
        }
        assert!(pass >= 450, "only {pass}/{sims} above 0.05");
    }

    #[test]
    fn exponential_samples_are_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4c4a);
        let sims = 500;
        let mut rejected = 0;
        for _ in 0..sims {
            let x: Vec<f64> = (0..150).map(|_| -rng.gen::<f64>().ln()).collect();
            if lilliefors(&x).unwrap().p_value < 0.01 {
                rejected += 1;
            }
        }
        assert!(rejected as f64 / sims as f64 >= 0.95, "{rejected}/{sims}");
    }

    #[test]
    fn degenerate_and_short_inputs_error() {
        assert!(matches!(
            lilliefors(&[1.0, 1.0, 1.0, 1.0, 1.0]),
            Err(StatsError::Degenerate { .. })
        ));
        assert!(matches!(
            lilliefors(&[1.0, 2.0]),
            Err(StatsError::TooFew { .. })
        ));
    }
}
