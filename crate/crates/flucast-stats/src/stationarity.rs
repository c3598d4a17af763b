use crate::result::{ensure_finite, StatsError, TestResult};

/// Critical values of the KPSS level-stationarity statistic, as
/// (p, critical value) pairs. The p-value is linearly interpolated between
/// them and clamped to [0.01, 0.10] outside the table.
pub const KPSS_CRITICAL_VALUES: [(f64, f64); 4] = [
    (0.10, 0.347),
    (0.05, 0.463),
    (0.025, 0.574),
    (0.01, 0.739),
];

/// KPSS test for level stationarity (null: stationary around a constant).
///
/// The long-run variance uses a Bartlett kernel with the given truncation
/// lag. `aux` records the lag, the long-run variance, and the clamp bounds of
/// the interpolated p-value.
pub fn kpss_level(values: &[f64], lag: usize) -> Result<TestResult, StatsError> {
    const TEST: &str = "kpss_level";
    ensure_finite(TEST, values)?;
    let n = values.len();
    if n < lag + 2 {
        return Err(StatsError::BadLag {
            test: TEST,
            lag,
            len: n,
        });
    }
    if values.iter().all(|&v| v == values[0]) {
        return Err(StatsError::Degenerate { test: TEST });
    }

    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let e: Vec<f64> = values.iter().map(|v| v - mean).collect();

    let mut cum = 0.0;
    let mut s_sq_sum = 0.0;
    for &et in &e {
        cum += et;
        s_sq_sum += cum * cum;
    }

    // Bartlett long-run variance estimate.
    let gamma = |j: usize| -> f64 {
        let mut acc = 0.0;
        for t in j..n {
            acc += e[t] * e[t - j];
        }
        acc / nf
    };
    let mut lrv = gamma(0);
    for j in 1..=lag {
        let w = 1.0 - j as f64 / (lag as f64 + 1.0);
        lrv += 2.0 * w * gamma(j);
    }
    if lrv <= 0.0 {
        return Err(StatsError::Degenerate { test: TEST });
    }

    let stat = s_sq_sum / (nf * nf * lrv);

    // Interpolate the p-value in the critical-value table, clamped at the
    // table's ends.
    let p = interpolate_p(stat);

    Ok(TestResult::new(TEST, stat, p)
        .with_aux("lag", lag as f64)
        .with_aux("long_run_variance", lrv)
        .with_aux("n", nf)
        .with_aux("p_clamp_low", 0.01)
        .with_aux("p_clamp_high", 0.10))
}

fn interpolate_p(stat: f64) -> f64 {
    let table = &KPSS_CRITICAL_VALUES;
    if stat <= table[0].1 {
        return table[0].0;
    }
    if stat >= table[table.len() - 1].1 {
        return table[table.len() - 1].0;
    }
    for w in table.windows(2) {
        let (p_lo, c_lo) = w[0];
        let (p_hi, c_hi) = w[1];
        if stat >= c_lo && stat <= c_hi {
            let t = (stat - c_lo) / (c_hi - c_lo);
            return p_lo + t * (p_hi - p_lo);
        }
    }
    unreachable!("stat covered by table bounds");
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn noise(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        // Sum of uniforms: light-tailed, symmetric, plenty for this use.
        (0..n)
            .map(|_| (0..12).map(|_| rng.gen::<f64>()).sum::<f64>() - 6.0)
            .collect()
    }

    #[test]
    fn white_noise_rarely_exceeds_the_ten_percent_critical_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4b50);
        let sims = 500;
        let mut below = 0;
        for _ in 0..sims {
            let x = noise(&mut rng, 500);
            let r = kpss_level(&x, 4).unwrap();
            if r.statistic < 0.347 {
                below += 1;
            }
        }
        assert!(
            below as f64 / sims as f64 >= 0.85,
            "only {below}/{sims} below the 10% critical value"
        );
    }

    #[test]
    fn random_walk_is_flagged_nonstationary() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x4b51);
        let mut detected = 0;
        let sims = 200;
        for _ in 0..sims {
            let steps = noise(&mut rng, 400);
            let mut walk = Vec::with_capacity(steps.len());
            let mut acc = 0.0;
            for s in steps {
                acc += s;
                walk.push(acc);
            }
            let r = kpss_level(&walk, 4).unwrap();
            if r.p_value <= 0.01 + 1e-12 {
                detected += 1;
            }
        }
        assert!(detected >= 180, "power too low: {detected}/{sims}");
    }

    #[test]
    fn p_interpolation_matches_hand_values() {
        // Midway between 0.463 and 0.574 the p-value is midway between
        // 0.05 and 0.025.
        assert!((interpolate_p(0.5185) - 0.0375).abs() < 1e-12);
        assert_eq!(interpolate_p(0.2), 0.10);
        assert_eq!(interpolate_p(2.0), 0.01);
        // The published level-statistic example: 0.509 -> about 0.0396.
        assert!((interpolate_p(0.509) - 0.039639).abs() < 1e-4);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(matches!(
            kpss_level(&[3.0; 50], 4),
            Err(StatsError::Degenerate { .. })
        ));
        assert!(matches!(
            kpss_level(&[1.0, 2.0, 3.0], 4),
            Err(StatsError::BadLag { .. })
        ));
    }

    #[test]
    fn aux_records_the_tunables() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = noise(&mut rng, 100);
        let r = kpss_level(&x, 4).unwrap();
        assert_eq!(r.aux["lag"], 4.0);
        assert!(r.aux["long_run_variance"] > 0.0);
        assert_eq!(r.aux["p_clamp_low"], 0.01);
        assert_eq!(r.aux["p_clamp_high"], 0.10);
    }
}
