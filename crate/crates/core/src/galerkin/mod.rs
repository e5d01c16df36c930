//! Faedo-Galerkin reduction of the fractional wave equation with acoustic
//! boundary conditions on the unit square (top edge acoustic, the other
//! three sides clamped) to a multi-order linear system, with energy monitors.

mod basis;
mod coefficients;
mod data;
mod dependence;
mod energy;
mod equivalence;
mod error;
mod ibvp;
mod model;

pub use basis::{boundary_mode, EigenBasis, Mode};
pub use coefficients::{BoundaryCoefficients, CoefficientField, Extrema};
pub use data::{BoundaryCoefficient, BoundaryField, InitialData, ModeCoefficient, SpatialField};
pub use dependence::{continuous_dependence_experiment, dependence_distance, DependenceRow, Perturbation};
pub use energy::{
    energy_estimate_1, energy_estimate_2, estimate_1_rhs, estimate_2_rhs, initial_boundary_acceleration_bound,
    EnergyReport, Estimate2Summary,
};
pub use equivalence::{check_order_equivalence, EquivalenceReport};
pub use error::GalerkinError;
pub use ibvp::{solve_ibvp, Block, IbvpSolution, IbvpSolver};
pub use model::{assemble_system, DataClass, GalerkinModel};
