use thiserror::Error;

use crate::fraccalc::FracError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("Picard iteration did not converge in {iterations} iterations (last increment {last_increment:e})")]
    NonConvergence { iterations: usize, last_increment: f64 },
    #[error("right-hand side returned a non-finite value at step {step}, component {component}")]
    Evaluation { step: usize, component: usize },
    #[error("contraction bound overflows before dropping below one (m = {m}); horizon too large for this certificate")]
    CertificateOverflow { m: usize },
    #[error("unsupported case: {0}")]
    Unsupported(String),
    #[error("weakly singular quadrature did not converge at t = {t}; refinement trace {trace:?}")]
    Quadrature { t: f64, trace: Vec<(usize, f64)> },
    #[error(transparent)]
    Frac(#[from] FracError),
}
