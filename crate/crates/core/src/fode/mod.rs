//! Multi-order Caputo ODE systems: problem types, Picard, predictor-corrector
//! and linear implicit solvers, the contraction certificate and closed-form
//! reference solutions for 2x2 linear systems.

mod certificate;
mod closed_form;
mod error;
mod implicit;
mod picard;
mod predictor_corrector;
mod problem;
mod residual;
mod singular_quadrature;
mod trajectory;

pub use certificate::{contraction_certificate, ContractionCertificate};
pub use closed_form::{closed_form_a1, closed_form_a2, closed_form_a3_rotation};
pub use error::SolveError;
pub use implicit::solve_linear_implicit;
pub use picard::solve_picard;
pub use predictor_corrector::{solve_predictor_corrector, solve_predictor_corrector_with, CorrectorOptions};
pub use problem::{BoxDomain, LinearBlockSystem, MultiOrderProblem, Rhs};
pub use residual::{residual_check, residual_profile};
pub use singular_quadrature::{weakly_singular_integral, QuadratureOutcome};
pub use trajectory::{SolutionTrajectory, SolverMetadata};
