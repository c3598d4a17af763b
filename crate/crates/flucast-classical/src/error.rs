use flucast_core::CoreError;

#[derive(Debug, thiserror::Error)]
pub enum ClassicalError {
    #[error("need at least {needed} observations, got {got}")]
    NotEnoughData { needed: usize, got: usize },

    #[error("parameter {name} = {value} outside its box {box_desc}")]
    ParamOutOfBox {
        name: &'static str,
        value: f64,
        box_desc: &'static str,
    },

    #[error("invalid model order: {0}")]
    BadOrder(String),

    #[error("input contains a non-finite value")]
    NonFinite,

    #[error("coefficient vector has wrong length: expected {expected}, got {got}")]
    BadCoefficientCount { expected: usize, got: usize },

    #[error("optimizer failed to find a finite objective value")]
    OptimizerFailed,

    #[error(transparent)]
    Core(#[from] CoreError),
}
