use thiserror::Error;

use crate::fode::SolveError;
use crate::fraccalc::FracError;

#[derive(Debug, Error)]
pub enum GalerkinError {
    #[error("coefficient {name} violates its sign condition: {value} at x = {x}")]
    Coefficient { name: &'static str, x: f64, value: f64 },
    #[error("quadrature did not reach the Gram tolerance {tolerance:e} (residual {residual:e} with {points} points)")]
    Assembly { points: usize, residual: f64, tolerance: f64 },
    #[error("model invariant violated: {0}")]
    Invariant(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Frac(#[from] FracError),
}
