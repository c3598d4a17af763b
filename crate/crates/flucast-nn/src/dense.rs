//! Batched dense (fully connected) layer with hand-derived gradients.
//!
//! Convention used across the crate: activations are **row vectors**, so a
//! batch is a `(batch, features)` matrix and the layer computes
//! `y = g(x · W + b)` with `W: (in, out)` and `b: 1×out` broadcast over rows.

use crate::activation::Activation;
use crate::error::NnError;
use crate::param::{Param, ParamVisitor};
use ndarray::{Array2, Axis};
use rand::Rng;

#[derive(Debug, Clone)]
pub struct DenseLayer {
    pub w: Param,
    pub b: Param,
    pub activation: Activation,
}

/// Forward-pass cache needed by [`DenseLayer::backward`].
#[derive(Debug, Clone)]
pub struct DenseCache {
    /// Input batch `(batch, in)`.
    pub x: Array2<f64>,
    /// Pre-activation `x·W + b`, `(batch, out)`.
    pub z: Array2<f64>,
}

impl DenseLayer {
    pub fn new(
        prefix: &str,
        fan_in: usize,
        fan_out: usize,
        activation: Activation,
        rng: &mut impl Rng,
    ) -> Self {
        Self {
            w: Param::uniform(format!("{prefix}.w"), fan_in, fan_out, fan_in, rng),
            b: Param::zeros(format!("{prefix}.b"), 1, fan_out),
            activation,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.w.value.nrows()
    }

    pub fn out_dim(&self) -> usize {
        self.w.value.ncols()
    }

    /// `y = g(x·W + b)` for a `(batch, in)` input.
    pub fn forward(&self, x: &Array2<f64>) -> Result<(Array2<f64>, DenseCache), NnError> {
        if x.ncols() != self.in_dim() {
            return Err(NnError::ShapeMismatch {
                op: "dense_forward",
                expected: format!("(_, {})", self.in_dim()),
                got: format!("{:?}", x.dim()),
            });
        }
        let mut z = x.dot(&self.w.value);
        z += &self.b.value;
        let y = z.mapv(|v| self.activation.apply(v));
        if !y.iter().all(|v| v.is_finite()) {
            return Err(NnError::non_finite("dense_forward"));
        }
        Ok((
            y,
            DenseCache {
                x: x.clone(),
                z,
            },
        ))
    }

    /// Chain rule through the layer. Accumulates parameter gradients in place
    /// and returns the gradient with respect to the input batch.
    pub fn backward(
        &mut self,
        cache: &DenseCache,
        upstream: &Array2<f64>,
    ) -> Result<Array2<f64>, NnError> {
        if upstream.dim() != cache.z.dim() {
            return Err(NnError::ShapeMismatch {
                op: "dense_backward",
                expected: format!("{:?}", cache.z.dim()),
                got: format!("{:?}", upstream.dim()),
            });
        }
        // dz = upstream ⊙ g'(z)
        let mut dz = upstream.clone();
        dz.zip_mut_with(&cache.z, |d, &z| *d *= self.activation.deriv(z));
        self.w.grad += &cache.x.t().dot(&dz);
        self.b.grad += &dz.sum_axis(Axis(0)).insert_axis(Axis(0));
        Ok(dz.dot(&self.w.value.t()))
    }
}

impl ParamVisitor for DenseLayer {
    fn visit_params(&mut self, f: &mut dyn FnMut(&mut Param)) {
        f(&mut self.w);
        f(&mut self.b);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_map_passes_input_through() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut layer = DenseLayer::new("d", 3, 3, Activation::Identity, &mut rng);
        layer.w.value = Array2::eye(3);
        let x = array![[1.0, -2.0, 0.5]];
        let (y, _) = layer.forward(&x).unwrap();
        assert_eq!(y, x);
    }

    #[test]
    fn sigmoid_slope_through_one_by_one_layer() {
        // W=1, b=0, sigmoid: dy/dx at x=0 is sigmoid'(0) = 0.25.
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut layer = DenseLayer::new("d", 1, 1, Activation::Sigmoid, &mut rng);
        layer.w.value[[0, 0]] = 1.0;
        let x = array![[0.0]];
        let (_, cache) = layer.forward(&x).unwrap();
        let dx = layer.backward(&cache, &array![[1.0]]).unwrap();
        assert!((dx[[0, 0]] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let layer = DenseLayer::new("d", 3, 2, Activation::Tanh, &mut rng);
        let bad = Array2::zeros((1, 4));
        assert!(matches!(
            layer.forward(&bad),
            Err(NnError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn batch_rows_are_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let layer = DenseLayer::new("d", 4, 2, Activation::Tanh, &mut rng);
        let x = Array2::from_shape_fn((3, 4), |(r, c)| (r * 4 + c) as f64 * 0.1 - 0.5);
        let (y, _) = layer.forward(&x).unwrap();
        for r in 0..3 {
            let row = x.row(r).insert_axis(Axis(0)).to_owned();
            let (yr, _) = layer.forward(&row).unwrap();
            assert_eq!(yr.row(0), y.row(r));
        }
    }
}
