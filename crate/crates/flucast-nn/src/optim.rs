//! SGD, RMSProp, and Adam.
//!
//! The optimizer owns per-parameter accumulators allocated lazily on the
//! first step and paired with parameters positionally, relying on the
//! stable visit order guaranteed by [`ParamVisitor`](crate::param::ParamVisitor).
//!
//! Update rules (g = gradient, lr = learning rate):
//! - SGD:      p ← p − lr·g
//! - RMSProp:  v ← ρ·v + (1−ρ)·g²;  p ← p − lr·g/(√v + ε), ρ = 0.9, ε = 1e-8
//! - Adam:     m ← β₁m + (1−β₁)g;  v ← β₂v + (1−β₂)g²;
//!             p ← p − lr·m̂/(√v̂ + ε) with bias-corrected m̂, v̂;
//!             β₁ = 0.9, β₂ = 0.999, ε = 1e-8

use crate::param::ParamVisitor;
use ndarray::Array2;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Sgd,
    Rmsprop,
    Adam,
}

impl OptimizerKind {
    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Rmsprop => "rmsprop",
            OptimizerKind::Adam => "adam",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "sgd" => Some(OptimizerKind::Sgd),
            "rmsprop" => Some(OptimizerKind::Rmsprop),
            "adam" => Some(OptimizerKind::Adam),
            _ => None,
        }
    }
}

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const RMSPROP_DECAY: f64 = 0.9;
const EPS: f64 = 1e-8;

/// Per-parameter accumulators: `m` is Adam's first moment, `v` doubles as
/// Adam's second moment and RMSProp's squared-gradient average.
#[derive(Debug, Clone)]
struct Slot {
    m: Array2<f64>,
    v: Array2<f64>,
}

#[derive(Debug, Clone)]
pub struct Optimizer {
    pub kind: OptimizerKind,
    pub learning_rate: f64,
    slots: Vec<Slot>,
    /// Strictly increasing step counter (drives Adam bias correction).
    pub step_count: u64,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, learning_rate: f64) -> Self {
        Self {
            kind,
            learning_rate,
            slots: Vec::new(),
            step_count: 0,
        }
    }

    /// Applies one update to every parameter of `model` from its accumulated
    /// gradients. Gradients are left untouched (callers zero them per batch).
    pub fn step(&mut self, model: &mut dyn ParamVisitor) {
        self.step_count += 1;
        let t = self.step_count;
        let lr = self.learning_rate;
        let kind = self.kind;
        let slots = &mut self.slots;
        let mut idx = 0usize;
        model.visit_params(&mut |p| {
            if slots.len() == idx {
                slots.push(Slot {
                    m: Array2::zeros(p.value.raw_dim()),
                    v: Array2::zeros(p.value.raw_dim()),
                });
            }
            let slot = &mut slots[idx];
            debug_assert_eq!(slot.v.raw_dim(), p.value.raw_dim(), "visit order changed");
            match kind {
                OptimizerKind::Sgd => {
                    p.value.zip_mut_with(&p.grad, |w, &g| *w -= lr * g);
                }
                OptimizerKind::Rmsprop => {
                    slot.v.zip_mut_with(&p.grad, |v, &g| {
                        *v = RMSPROP_DECAY * *v + (1.0 - RMSPROP_DECAY) * g * g;
                    });
                    ndarray::Zip::from(&mut p.value)
                        .and(&p.grad)
                        .and(&slot.v)
                        .for_each(|w, &g, &v| *w -= lr * g / (v.sqrt() + EPS));
                }
                OptimizerKind::Adam => {
                    slot.m.zip_mut_with(&p.grad, |m, &g| {
                        *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
                    });
                    slot.v.zip_mut_with(&p.grad, |v, &g| {
                        *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
                    });
                    let c1 = 1.0 - ADAM_BETA1.powi(t as i32);
                    let c2 = 1.0 - ADAM_BETA2.powi(t as i32);
                    ndarray::Zip::from(&mut p.value)
                        .and(&slot.m)
                        .and(&slot.v)
                        .for_each(|w, &m, &v| {
                            let m_hat = m / c1;
                            let v_hat = v / c2;
                            *w -= lr * m_hat / (v_hat.sqrt() + EPS);
                        });
                }
            }
            idx += 1;
        });
    }
}
