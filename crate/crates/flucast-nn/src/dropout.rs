//! Inverted dropout.
//!
//! Training mode zeroes each element independently with probability `rate`
//! and scales survivors by `1/(1-rate)`, so inference is a plain identity
//! (no activation rescaling at prediction time). The mask is returned for
//! the backward pass: the gradient of dropout is elementwise multiplication
//! by the same mask.

use crate::error::NnError;
use ndarray::Array2;
use rand::Rng;

/// Applies inverted dropout in place and returns the mask (entries are either
/// `0` or `1/(1-rate)`), or `None` in inference mode / at rate 0.
pub fn dropout_apply(
    x: &mut Array2<f64>,
    rate: f64,
    training: bool,
    rng: &mut impl Rng,
) -> Result<Option<Array2<f64>>, NnError> {
    if !(0.0..1.0).contains(&rate) {
        return Err(NnError::BadConfig(format!(
            "dropout rate must lie in [0, 1), got {rate}"
        )));
    }
    if !training || rate == 0.0 {
        return Ok(None);
    }
    let keep = 1.0 - rate;
    let scale = 1.0 / keep;
    let mask = Array2::from_shape_fn(x.raw_dim(), |_| {
        if rng.gen::<f64>() < rate {
            0.0
        } else {
            scale
        }
    });
    *x *= &mask;
    Ok(Some(mask))
}

/// Backward through a dropout application: multiply by the stored mask.
pub fn dropout_backward(grad: &mut Array2<f64>, mask: &Option<Array2<f64>>) {
    if let Some(m) = mask {
        *grad *= m;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rate_zero_is_identity_in_both_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for training in [false, true] {
            let mut x = Array2::from_elem((4, 4), 2.5);
            let mask = dropout_apply(&mut x, 0.0, training, &mut rng).unwrap();
            assert!(mask.is_none());
            assert!(x.iter().all(|&v| v == 2.5));
        }
    }

    #[test]
    fn inference_mode_is_bitwise_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let orig = Array2::from_shape_fn((8, 8), |(r, c)| (r as f64) * 0.3 - (c as f64) * 0.7);
        let mut x = orig.clone();
        let mask = dropout_apply(&mut x, 0.3, false, &mut rng).unwrap();
        assert!(mask.is_none());
        assert_eq!(x, orig);
    }

    #[test]
    fn training_mode_zeroes_the_right_fraction_and_preserves_mean() {
        // Law-of-large-numbers check on a million entries.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut x = Array2::from_elem((1000, 1000), 1.0);
        dropout_apply(&mut x, 0.3, true, &mut rng).unwrap();
        let zeroed = x.iter().filter(|&&v| v == 0.0).count() as f64 / 1e6;
        assert!((zeroed - 0.3).abs() < 0.005, "zeroed fraction {zeroed}");
        let mean = x.sum() / 1e6;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn invalid_rate_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut x = Array2::zeros((1, 1));
        assert!(dropout_apply(&mut x, 1.0, true, &mut rng).is_err());
        assert!(dropout_apply(&mut x, -0.1, true, &mut rng).is_err());
    }

    #[test]
    fn backward_applies_the_same_mask() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut x = Array2::from_elem((5, 5), 1.0);
        let mask = dropout_apply(&mut x, 0.4, true, &mut rng).unwrap();
        let mut grad = Array2::from_elem((5, 5), 1.0);
        dropout_backward(&mut grad, &mask);
        assert_eq!(grad, x);
    }
}
