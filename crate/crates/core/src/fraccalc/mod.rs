//! Special functions and discrete Riemann-Liouville / Caputo operators.

mod error;
mod gamma;
mod grid;
mod identities;
mod mittag_leffler;
mod operators;

pub use error::FracError;
pub use gamma::{gamma_fn, ln_gamma};
pub use grid::{FracOrder, SampledFunction, TimeGrid};
pub use identities::{
    caputo_square_inequality, check_identity_suite, check_identity_suite_with_derivative, IdentityReport,
};
pub use mittag_leffler::{mittag_leffler, mittag_leffler_complex, MLParams, MittagLeffler};
pub use operators::{caputo_derivative, caputo_values, rl_integral, rl_integral_values, RlWeights};
