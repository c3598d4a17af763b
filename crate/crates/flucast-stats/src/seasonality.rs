use statrs::distribution::{ChiSquared, ContinuousCDF};

use flucast_core::TimeSeries;

use crate::rank::average_ranks;
use crate::result::{ensure_finite, StatsError, TestResult};

/// Kruskal-Wallis rank test across arbitrary groups, with tie correction.
/// The p-value comes from the chi-square approximation with k-1 degrees of
/// freedom.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<TestResult, StatsError> {
    const TEST: &str = "kruskal_wallis";
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups(groups.len()));
    }
    for (g, members) in groups.iter().enumerate() {
        if members.is_empty() {
            return Err(StatsError::EmptyGroup { group: g });
        }
        ensure_finite("kruskal_wallis", members)?;
    }

    let pooled: Vec<f64> = groups.iter().flatten().cloned().collect();
    let n = pooled.len() as f64;
    let (ranks, tie_sizes) = average_ranks(&pooled);

    let mut h = 0.0;
    let mut offset = 0;
    for members in groups {
        let r_sum: f64 = ranks[offset..offset + members.len()].iter().sum();
        h += r_sum * r_sum / members.len() as f64;
        offset += members.len();
    }
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);

    let tie_term: f64 = tie_sizes
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let correction = 1.0 - tie_term / (n * n * n - n);
    if correction <= 0.0 {
        return Err(StatsError::Degenerate { test: TEST });
    }
    h /= correction;

    let df = (groups.len() - 1) as f64;
    let chi2 = ChiSquared::new(df).expect("positive df");
    let p = (1.0 - chi2.cdf(h)).clamp(0.0, 1.0);

    Ok(TestResult::new(TEST, h, p)
        .with_df(df)
        .with_aux("groups", groups.len() as f64)
        .with_aux("n", n)
        .with_aux("tie_correction", correction))
}

/// Kruskal-Wallis with calendar months as groups: "is there a month effect?"
/// Every month of the year must be observed at least once.
pub fn kruskal_wallis_by_month(series: &TimeSeries) -> Result<TestResult, StatsError> {
    let mut groups: Vec<Vec<f64>> = vec![Vec::new(); 12];
    for (month, &value) in series.months().zip(series.values().iter()) {
        groups[(month.month - 1) as usize].push(value);
    }
    kruskal_wallis(&groups)
}
