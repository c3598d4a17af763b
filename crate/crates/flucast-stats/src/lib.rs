//! Hypothesis tests used to characterize a monthly count series before and
//! after model fitting: monotone-trend (Mann-Kendall), month-effect
//! seasonality (Kruskal-Wallis), level stationarity (KPSS), residual
//! whiteness (Ljung-Box / Box-Pierce), residual normality (Lilliefors), and
//! residual homoscedasticity (Goldfeld-Quandt).
//!
//! Every test returns a [`TestResult`] carrying the statistic, the p-value,
//! optional degrees of freedom, and an `aux` map recording every tunable that
//! affected the computation (lags, tie corrections, clamp bounds, group
//! counts), so reports are self-describing.

pub mod result;
pub mod trend;
pub mod seasonality;
pub mod stationarity;
pub mod whiteness;
pub mod normality;
pub mod variance;

pub use result::{StatsError, TestResult};
pub use trend::mann_kendall;
pub use seasonality::{kruskal_wallis, kruskal_wallis_by_month};
pub use stationarity::{kpss_level, KPSS_CRITICAL_VALUES};
pub use whiteness::{ljung_box, PortmanteauVariant};
pub use normality::lilliefors;
pub use variance::goldfeld_quandt;

pub(crate) mod rank {
    /// Average ranks (1-based) with ties sharing the mean rank, plus the tie
    /// group sizes (groups of size 1 included).
    pub fn average_ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
        let mut ranks = vec![0.0; n];
        let mut tie_sizes = Vec::new();
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && values[order[j + 1]] == values[order[i]] {
                j += 1;
            }
            // Positions i..=j share the average of ranks i+1..=j+1.
            let avg = (i + 1 + j + 1) as f64 / 2.0;
            for k in i..=j {
                ranks[order[k]] = avg;
            }
            tie_sizes.push(j - i + 1);
            i = j + 1;
        }
        (ranks, tie_sizes)
    }
}

#[cfg(test)]
mod rank_tests {
    use super::rank::average_ranks;

    #[test]
    fn ties_share_average_ranks() {
        let (ranks, ties) = average_ranks(&[3.0, 1.0, 3.0, 2.0]);
        assert_eq!(ranks, vec![3.5, 1.0, 3.5, 2.0]);
        assert_eq!(ties, vec![1, 1, 2]);
    }
}
