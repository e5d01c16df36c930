//! Fractional calculus on uniform time grids, multi-order Caputo ODE solvers,
//! and a Faedo-Galerkin model of the time-fractional wave equation with
//! acoustic boundary conditions on the unit square.

pub mod export;
pub mod fode;
pub mod fraccalc;
pub mod galerkin;
pub mod quadrature;
