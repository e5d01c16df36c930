use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FracError {
    #[error("gamma function has a pole at {0}")]
    GammaPole(f64),
    #[error("fractional order {0} outside (0, 1]")]
    InvalidOrder(f64),
    #[error("invalid time grid: T = {horizon}, N = {steps}")]
    InvalidGrid { horizon: f64, steps: usize },
    #[error("sample count {got} does not match grid with {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid Mittag-Leffler parameters: {0}")]
    InvalidParams(String),
    #[error("Mittag-Leffler evaluation failed at z = {z}: {reason}")]
    Evaluation { z: f64, reason: String },
}
