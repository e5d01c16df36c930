use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{assemble_system, EnergyReport, GalerkinError, GalerkinModel};
use crate::export::{write_numeric_csv, ExportError};
use crate::fode::{solve_linear_implicit, solve_picard, solve_predictor_corrector_with, CorrectorOptions, SolutionTrajectory};
use crate::fraccalc::{FracOrder, TimeGrid};

/// Integrator for the assembled 4m system.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum IbvpSolver {
    /// Direct solve of the implicit product-trapezoid step.
    #[default]
    Implicit,
    PredictorCorrector { passes: usize },
    Picard { tol: f64, max_outer: usize },
}

/// State blocks in the layout (y | a | v | b).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    /// u' coefficients
    Velocity,
    /// u coefficients
    Displacement,
    /// δ' coefficients
    BoundaryVelocity,
    /// δ coefficients
    Boundary,
}

impl Block {
    fn offset(self) -> usize {
        match self {
            Block::Velocity => 0,
            Block::Displacement => 1,
            Block::BoundaryVelocity => 2,
            Block::Boundary => 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IbvpSolution {
    pub alpha: FracOrder,
    pub trajectory: SolutionTrajectory,
    pub report: EnergyReport,
}

impl IbvpSolution {
    pub fn m(&self) -> usize {
        self.trajectory.dim() / 4
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.trajectory.grid
    }

    /// Coefficients of one block at node k.
    pub fn block(&self, k: usize, which: Block) -> &[f64] {
        let m = self.m();
        let o = which.offset() * m;
        &self.trajectory.states[k][o..o + m]
    }

    /// Right-hand side of one block at node k (the Caputo derivative of the
    /// velocity block, the time derivative of the others).
    pub fn block_rate(&self, k: usize, which: Block) -> &[f64] {
        let m = self.m();
        let o = which.offset() * m;
        &self.trajectory.caputo_values[k][o..o + m]
    }

    /// Time series of component i of a block.
    pub fn series(&self, which: Block, i: usize) -> Vec<f64> {
        (0..self.grid().len()).map(|k| self.block(k, which)[i]).collect()
    }

    /// Rows (t, x, y, u) on an (n+1)² lattice every `stride` nodes.
    pub fn write_u_field<W: Write>(&self, model: &GalerkinModel, out: W, n: usize, stride: usize) -> Result<(), ExportError> {
        let n = n.max(1);
        let mut rows = Vec::new();
        for k in (0..self.grid().len()).step_by(stride.max(1)) {
            let t = self.grid().node(k);
            let a = self.block(k, Block::Displacement);
            for i in 0..=n {
                for j in 0..=n {
                    let (x, y) = (i as f64 / n as f64, j as f64 / n as f64);
                    rows.push(vec![t, x, y, model.basis.synthesize(a, x, y)]);
                }
            }
        }
        write_numeric_csv(out, &["t", "x", "y", "u"].map(String::from), &rows)
    }

    /// Rows (t, x, delta) on n+1 edge points every `stride` nodes.
    pub fn write_delta_field<W: Write>(&self, model: &GalerkinModel, out: W, n: usize, stride: usize) -> Result<(), ExportError> {
        let n = n.max(1);
        let mut rows = Vec::new();
        for k in (0..self.grid().len()).step_by(stride.max(1)) {
            let t = self.grid().node(k);
            let b = self.block(k, Block::Boundary);
            for i in 0..=n {
                let x = i as f64 / n as f64;
                rows.push(vec![t, x, model.basis.synthesize_boundary(b, x)]);
            }
        }
        write_numeric_csv(out, &["t", "x", "delta"].map(String::from), &rows)
    }

    pub fn write_u_field_file(&self, model: &GalerkinModel, path: &Path, n: usize, stride: usize) -> Result<(), ExportError> {
        self.write_u_field(model, std::io::BufWriter::new(std::fs::File::create(path)?), n, stride)
    }

    pub fn write_delta_field_file(&self, model: &GalerkinModel, path: &Path, n: usize, stride: usize) -> Result<(), ExportError> {
        self.write_delta_field(model, std::io::BufWriter::new(std::fs::File::create(path)?), n, stride)
    }
}

/// Solves the Galerkin system on the grid and evaluates the energy report.
pub fn solve_ibvp(
    model: &GalerkinModel,
    alpha: FracOrder,
    grid: &TimeGrid,
    solver: IbvpSolver,
) -> Result<IbvpSolution, GalerkinError> {
    let trajectory = match solver {
        IbvpSolver::Implicit => solve_linear_implicit(&model.linear_system(alpha)?, &model.initial_state(), grid)?,
        IbvpSolver::PredictorCorrector { passes } => {
            let p = assemble_system(model, alpha, grid.horizon())?;
            solve_predictor_corrector_with(
                &p,
                grid,
                CorrectorOptions {
                    passes,
                    tolerance: None,
                },
            )?
        }
        IbvpSolver::Picard { tol, max_outer } => {
            let p = assemble_system(model, alpha, grid.horizon())?;
            solve_picard(&p, grid, tol, max_outer)?
        }
    };
    let report = EnergyReport::evaluate(model, alpha, &trajectory)?;
    Ok(IbvpSolution {
        alpha,
        trajectory,
        report,
    })
}
