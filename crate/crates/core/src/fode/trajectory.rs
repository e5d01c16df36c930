use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ContractionCertificate;
use crate::export::{write_json_file, write_numeric_csv, ExportError};
use crate::fraccalc::TimeGrid;

/// What the solver did and how it ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverMetadata {
    pub method: String,
    /// Picard outer iterations, or the largest number of corrector passes in
    /// any single step.
    pub iterations: usize,
    /// Sup-norm distance between successive Picard iterates.
    pub increments: Vec<f64>,
    pub tolerance: Option<f64>,
    /// First node at which the state left the monitored box, if any.
    pub domain_exit: Option<usize>,
    pub certificate: Option<ContractionCertificate>,
}

/// States and Caputo derivatives of a solution on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTrajectory {
    pub grid: TimeGrid,
    pub orders: Vec<f64>,
    pub xi: Vec<f64>,
    /// states[k][j] = φ_j(t_k)
    pub states: Vec<Vec<f64>>,
    /// caputo_values[k][j] = f_j(φ(t_k), t_k)
    pub caputo_values: Vec<Vec<f64>>,
    pub meta: SolverMetadata,
}

#[derive(Serialize)]
struct TrajectoryJson<'a> {
    horizon: f64,
    steps: usize,
    orders: &'a [f64],
    xi: &'a [f64],
    #[serde(flatten)]
    meta: &'a SolverMetadata,
    residual: Option<f64>,
}

impl SolutionTrajectory {
    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    /// Samples of one component.
    pub fn component(&self, j: usize) -> Vec<f64> {
        self.states.iter().map(|s| s[j]).collect()
    }

    /// Sup over nodes and components of |self - other|.
    pub fn max_difference(&self, other: &SolutionTrajectory) -> f64 {
        self.states
            .iter()
            .zip(&other.states)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    pub(crate) fn record_domain_exit(&mut self, domain: Option<&super::BoxDomain>) {
        self.meta.domain_exit = domain.and_then(|d| self.states.iter().position(|s| !d.contains(s)));
    }

    /// CSV with columns t, x1..xn, cd1..cdn, residual.
    pub fn write_csv<W: Write>(&self, out: W, residuals: &[f64]) -> Result<(), ExportError> {
        let n = self.dim();
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|j| format!("x{j}")));
        header.extend((1..=n).map(|j| format!("cd{j}")));
        header.push("residual".into());
        let rows: Vec<Vec<f64>> = (0..self.grid.len())
            .map(|k| {
                let mut row = Vec::with_capacity(2 * n + 2);
                row.push(self.grid.node(k));
                row.extend_from_slice(&self.states[k]);
                row.extend_from_slice(&self.caputo_values[k]);
                row.push(residuals.get(k).copied().unwrap_or(f64::NAN));
                row
            })
            .collect();
        write_numeric_csv(out, &header, &rows)
    }

    pub fn write_csv_file(&self, path: &Path, residuals: &[f64]) -> Result<(), ExportError> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file), residuals)
    }

    /// JSON metadata: orders, ξ, solver settings, iterations, certificate.
    pub fn metadata_json(&self, residual: Option<f64>) -> serde_json::Value {
        serde_json::to_value(TrajectoryJson {
            horizon: self.grid.horizon(),
            steps: self.grid.steps(),
            orders: &self.orders,
            xi: &self.xi,
            meta: &self.meta,
            residual,
        })
        .expect("metadata is serialisable")
    }

    pub fn write_metadata_file(&self, path: &Path, residual: Option<f64>) -> Result<(), ExportError> {
        write_json_file(path, &self.metadata_json(residual))
    }
}
