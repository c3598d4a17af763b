//! Named parameter tensors with paired gradient buffers.
//!
//! Every trainable tensor in this crate is a [`Param`]: a 2-D `f64` array
//! (vectors are `1×n` rows) plus a same-shaped gradient accumulator. Models
//! expose their parameters through [`ParamVisitor`] in a stable declaration
//! order, which is what lets the optimizer keep its per-parameter state
//! aligned without any registry or string lookup.

use ndarray::Array2;
use rand::Rng;

/// One trainable tensor and its gradient accumulator.
#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    /// Stable name for snapshots and debugging (e.g. `"layer0.fwd.w"`).
    pub name: String,
    pub value: Array2<f64>,
    pub grad: Array2<f64>,
}

impl Param {
    /// A parameter initialized from `uniform(-sqrt(1/fan_in), +sqrt(1/fan_in))`,
    /// the recorded default initialization scheme.
    pub fn uniform(
        name: impl Into<String>,
        rows: usize,
        cols: usize,
        fan_in: usize,
        rng: &mut impl Rng,
    ) -> Self {
        let bound = (1.0 / fan_in.max(1) as f64).sqrt();
        let value = Array2::from_shape_fn((rows, cols), |_| rng.gen_range(-bound..bound));
        Self {
            name: name.into(),
            grad: Array2::zeros(value.raw_dim()),
            value,
        }
    }

    /// A zero-initialized parameter (biases, layer-norm shifts).
    pub fn zeros(name: impl Into<String>, rows: usize, cols: usize) -> Self {
        Self {
            name: name.into(),
            value: Array2::zeros((rows, cols)),
            grad: Array2::zeros((rows, cols)),
        }
    }

    /// A one-initialized parameter (layer-norm scales).
    pub fn ones(name: impl Into<String>, rows: usize, cols: usize) -> Self {
        Self {
            name: name.into(),
            value: Array2::ones((rows, cols)),
            grad: Array2::zeros((rows, cols)),
        }
    }

    pub fn zero_grad(&mut self) {
        self.grad.fill(0.0);
    }
}

/// Visitor access to a model's parameters in stable declaration order.
///
/// The order must not depend on runtime state: the optimizer allocates its
/// moment buffers on first visit and pairs them positionally ever after, and
/// snapshots save/restore by the same order (names are cross-checked).
pub trait ParamVisitor {
    fn visit_params(&mut self, f: &mut dyn FnMut(&mut Param));

    fn zero_grads(&mut self) {
        self.visit_params(&mut |p| p.zero_grad());
    }

    fn param_count(&mut self) -> usize {
        let mut n = 0;
        self.visit_params(&mut |p| n += p.value.len());
        n
    }

    /// Global gradient L2 norm across all parameters.
    fn grad_norm(&mut self) -> f64 {
        let mut sq = 0.0;
        self.visit_params(&mut |p| sq += p.grad.iter().map(|g| g * g).sum::<f64>());
        sq.sqrt()
    }

    /// Scales every gradient so the global norm is at most `max_norm`.
    /// Returns true when clipping actually fired.
    fn clip_grad_norm(&mut self, max_norm: f64) -> bool {
        let norm = self.grad_norm();
        if norm > max_norm && norm.is_finite() {
            let s = max_norm / norm;
            self.visit_params(&mut |p| p.grad.mapv_inplace(|g| g * s));
            true
        } else {
            false
        }
    }
}
