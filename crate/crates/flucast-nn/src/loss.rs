//! Mean-squared-error loss with its gradient.

use crate::error::NnError;
use ndarray::Array2;

/// `loss = mean((pred - target)²)`, `grad = 2(pred - target)/n` where `n` is
/// the total element count. Shapes must match exactly.
pub fn mse_loss(pred: &Array2<f64>, target: &Array2<f64>) -> Result<(f64, Array2<f64>), NnError> {
    if pred.dim() != target.dim() {
        return Err(NnError::ShapeMismatch {
            op: "mse_loss",
            expected: format!("{:?}", target.dim()),
            got: format!("{:?}", pred.dim()),
        });
    }
    let n = pred.len();
    if n == 0 {
        return Err(NnError::EmptyDataset);
    }
    let diff = pred - target;
    let loss = diff.iter().map(|d| d * d).sum::<f64>() / n as f64;
    if !loss.is_finite() {
        return Err(NnError::non_finite("mse_loss"));
    }
    let grad = diff.mapv(|d| 2.0 * d / n as f64);
    Ok((loss, grad))
}
