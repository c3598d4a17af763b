use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// Min-max scaler fitted on the training segment only.
///
/// `transform` maps the fitted minimum to 0 and the fitted maximum to 1 and
/// deliberately does not clamp: values outside the fitted range (e.g. test
/// observations larger than anything seen in training) map outside [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub lo: f64,
    pub hi: f64,
}

impl MinMaxScaler {
    pub fn fit(values: &[f64]) -> Result<Self, CoreError> {
        if values.is_empty() {
            return Err(CoreError::EmptySeries);
        }
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if lo == hi {
            return Err(CoreError::ConstantSeries);
        }
        Ok(MinMaxScaler { lo, hi })
    }

    pub fn transform_one(&self, x: f64) -> f64 {
        (x - self.lo) / (self.hi - self.lo)
    }

    pub fn inverse_one(&self, z: f64) -> f64 {
        z * (self.hi - self.lo) + self.lo
    }

    pub fn transform(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&x| self.transform_one(x)).collect()
    }

    pub fn inverse(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|&z| self.inverse_one(z)).collect()
    }
}

/// Sliding one-step-ahead windows: `windows[i]` is `values[i..i + window_len]`
/// and `targets[i]` is `values[i + window_len]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowedDataset {
    pub window_len: usize,
    pub windows: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl WindowedDataset {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }
}

pub fn make_windows(values: &[f64], window_len: usize) -> Result<WindowedDataset, CoreError> {
    if window_len == 0 || window_len >= values.len() {
        return Err(CoreError::BadWindowLength {
            window: window_len,
            len: values.len(),
            max: values.len().saturating_sub(1),
        });
    }
    let n = values.len() - window_len;
    let mut windows = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    for i in 0..n {
        windows.push(values[i..i + window_len].to_vec());
        targets.push(values[i + window_len]);
    }
    Ok(WindowedDataset {
        window_len,
        windows,
        targets,
    })
}

/// Leading values consumed by `difference`, retained so `integrate` can
/// reconstruct the original series exactly. Seasonal passes are applied first,
/// then regular passes; integration reverses that order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferencePivots {
    pub d: usize,
    pub seasonal_d: usize,
    pub period: usize,
    /// First `period` values of the working series before each seasonal pass.
    pub seasonal_heads: Vec<Vec<f64>>,
    /// First value of the working series before each regular pass.
    pub regular_heads: Vec<f64>,
}

/// Applies `seasonal_d` seasonal differences (lag `period`) followed by `d`
/// regular differences. Output length is `n - d - seasonal_d * period`.
pub fn difference(
    values: &[f64],
    d: usize,
    seasonal_d: usize,
    period: usize,
) -> Result<(Vec<f64>, DifferencePivots), CoreError> {
    let removed = d + seasonal_d * period;
    if removed >= values.len() {
        return Err(CoreError::OverDifferenced {
            removed,
            len: values.len(),
        });
    }
    if seasonal_d > 0 && period < 2 {
        return Err(CoreError::BadPeriod(period));
    }

    let mut cur = values.to_vec();
    let mut seasonal_heads = Vec::with_capacity(seasonal_d);
    for _ in 0..seasonal_d {
        seasonal_heads.push(cur[..period].to_vec());
        cur = cur.windows(period + 1).map(|w| w[period] - w[0]).collect();
    }
    let mut regular_heads = Vec::with_capacity(d);
    for _ in 0..d {
        regular_heads.push(cur[0]);
        cur = cur.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Ok((
        cur,
        DifferencePivots {
            d,
            seasonal_d,
            period,
            seasonal_heads,
            regular_heads,
        },
    ))
}

/// Exact inverse of `difference` for the same pivots. Also accepts a longer
/// differenced vector (e.g. with forecasts appended), in which case the
/// reconstruction extends past the original series.
pub fn integrate(differenced: &[f64], pivots: &DifferencePivots) -> Vec<f64> {
    let mut cur = differenced.to_vec();
    for &head in pivots.regular_heads.iter().rev() {
        let mut out = Vec::with_capacity(cur.len() + 1);
        out.push(head);
        for &dv in &cur {
            out.push(out[out.len() - 1] + dv);
        }
        cur = out;
    }
    for head in pivots.seasonal_heads.iter().rev() {
        let mut out = Vec::with_capacity(cur.len() + pivots.period);
        out.extend_from_slice(head);
        for (i, &dv) in cur.iter().enumerate() {
            let base = out[i];
            out.push(base + dv);
        }
        cur = out;
    }
    cur
}
