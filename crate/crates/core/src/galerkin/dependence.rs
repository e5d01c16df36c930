use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{solve_ibvp, Block, BoundaryCoefficients, CoefficientField, GalerkinError, GalerkinModel, IbvpSolution, IbvpSolver, InitialData};
use crate::fraccalc::{FracOrder, TimeGrid};

/// Direction of a perturbation; a run at scale s uses base + s · direction.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    #[serde(default)]
    pub f: CoefficientField,
    #[serde(default)]
    pub g: CoefficientField,
    #[serde(default)]
    pub h: CoefficientField,
    #[serde(default)]
    pub data: InitialData,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DependenceRow {
    pub scale: f64,
    /// max_t ((Δu, Δu))^{1/2}
    pub d_u: f64,
    /// max_t |Δδ| + max_t |Δδ'|
    pub d_delta: f64,
    pub d_total: f64,
}

fn perturbed(base: &GalerkinModel, pert: &Perturbation, s: f64) -> Result<GalerkinModel, GalerkinError> {
    let c = &base.coeffs;
    let coeffs = BoundaryCoefficients::new(c.f.plus(&pert.f, s), c.g.plus(&pert.g, s), c.h.plus(&pert.h, s))?;
    GalerkinModel::build(base.m(), coeffs, base.data.plus(&pert.data, s))
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Distance between two runs on the same basis and grid.
pub fn dependence_distance(model: &GalerkinModel, a: &IbvpSolution, b: &IbvpSolution) -> (f64, f64) {
    let (mut du, mut dd, mut dv) = (0.0_f64, 0.0_f64, 0.0_f64);
    let diff = |x: &[f64], y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(p, q)| p - q).collect() };
    for k in 0..a.grid().len() {
        let da = diff(a.block(k, Block::Displacement), b.block(k, Block::Displacement));
        let v = nalgebra::DVector::from_vec(da);
        du = du.max(v.dot(&(&model.a1 * &v)).max(0.0).sqrt());
        dd = dd.max(norm(&diff(a.block(k, Block::Boundary), b.block(k, Block::Boundary))));
        dv = dv.max(norm(&diff(a.block(k, Block::BoundaryVelocity), b.block(k, Block::BoundaryVelocity))));
    }
    (du, dd + dv)
}

/// Runs the base model and one perturbed model per scale (concurrently) and
/// tabulates the distance of each perturbed run to the base run.
pub fn continuous_dependence_experiment(
    base: &GalerkinModel,
    pert: &Perturbation,
    scales: &[f64],
    alpha: FracOrder,
    grid: &TimeGrid,
    solver: IbvpSolver,
) -> Result<Vec<DependenceRow>, GalerkinError> {
    if scales.iter().any(|s| !s.is_finite() || *s < 0.0) {
        return Err(GalerkinError::InvalidInput("scales must be finite and non-negative".into()));
    }
    let reference = solve_ibvp(base, alpha, grid, solver)?;
    scales
        .par_iter()
        .map(|&s| {
            let model = perturbed(base, pert, s)?;
            let run = solve_ibvp(&model, alpha, grid, solver)?;
            let (d_u, d_delta) = dependence_distance(base, &reference, &run);
            Ok(DependenceRow {
                scale: s,
                d_u,
                d_delta,
                d_total: d_u + d_delta,
            })
        })
        .collect()
}
