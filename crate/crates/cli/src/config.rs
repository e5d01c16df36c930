//! TOML scenario configuration.
//!
//! One file describes one run. Paths are resolved against the directory
//! holding the config file; nothing is read from the environment.

use std::path::{Path, PathBuf};

use fracwave::galerkin::{BoundaryCoefficients, CoefficientField, IbvpSolver, InitialData, Perturbation};
use serde::{Deserialize, Serialize};

use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    IdentitySuite,
    FodeOracle,
    Ibvp,
    Convergence,
    Dependence,
}

impl ScenarioKind {
    pub const ALL: [&'static str; 5] = ["identity-suite", "fode-oracle", "ibvp", "convergence", "dependence"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
}

/// Sampled test functions for the identity suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunction {
    Sin,
    Cos3,
    Square,
    Linear,
    Constant,
}

impl TestFunction {
    pub const ALL: [&'static str; 5] = ["sin", "cos3", "square", "linear", "constant"];

    pub fn eval(self, t: f64) -> f64 {
        match self {
            Self::Sin => t.sin(),
            Self::Cos3 => (3.0 * t).cos(),
            Self::Square => t * t,
            Self::Linear => t,
            Self::Constant => 2.0,
        }
    }

    pub fn derivative(self, t: f64) -> f64 {
        match self {
            Self::Sin => t.cos(),
            Self::Cos3 => -3.0 * (3.0 * t).sin(),
            Self::Square => 2.0 * t,
            Self::Linear => 1.0,
            Self::Constant => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitySpec {
    pub function: TestFunction,
    pub alphas: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleCase {
    /// diag(λ, μ)
    A1,
    /// [[λ, 1], [0, λ]]
    A2,
    /// [[0, μ], [-μ, 0]]
    A3Rotation,
}

impl OracleCase {
    pub const ALL: [&'static str; 3] = ["a1", "a2", "a3-rotation"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    pub case: OracleCase,
    pub orders: [f64; 2],
    pub xi: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

/// A named preset or an explicit c + a sin(πx) + b x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientSpec {
    Preset(String),
    Field(CoefficientField),
}

impl CoefficientSpec {
    fn resolve(&self, key: &str) -> Result<CoefficientField, RunError> {
        match self {
            Self::Field(f) => Ok(*f),
            Self::Preset(name) => CoefficientField::preset(name)
                .ok_or_else(|| RunError::Schema(format!("{key}: unknown coefficient preset '{name}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DataSpec {
    Preset(String),
    Explicit(InitialData),
}

impl DataSpec {
    fn resolve(&self, key: &str) -> Result<InitialData, RunError> {
        match self {
            Self::Explicit(d) => Ok(d.clone()),
            Self::Preset(name) => InitialData::preset(name)
                .ok_or_else(|| RunError::Schema(format!("{key}: unknown initial-data preset '{name}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub m: usize,
    pub f: CoefficientSpec,
    pub g: CoefficientSpec,
    pub h: CoefficientSpec,
    pub data: DataSpec,
}

impl ModelSpec {
    pub fn coefficients(&self) -> Result<BoundaryCoefficients, RunError> {
        let (f, g, h) = (self.f.resolve("model.f")?, self.g.resolve("model.g")?, self.h.resolve("model.h")?);
        BoundaryCoefficients::new(f, g, h).map_err(|e| RunError::Schema(format!("model: {e}")))
    }

    pub fn data(&self) -> Result<InitialData, RunError> {
        self.data.resolve("model.data")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceTarget {
    Oracle,
    Ibvp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    ClosedForm,
    Finest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSpec {
    pub target: ConvergenceTarget,
    pub ladder: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Reference>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DependenceSpec {
    pub scales: Vec<f64>,
    #[serde(default)]
    pub perturbation: Perturbation,
}

/// Thresholds; unset entries take the scenario default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inequality_margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub square_margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate_1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate_2: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_drift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_order: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_order: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monotone: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linearity: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportSpec {
    /// lattice intervals per side for u_field.csv and delta_field.csv
    #[serde(default = "default_lattice")]
    pub lattice: usize,
    /// time slices written to the field files
    #[serde(default = "default_slices")]
    pub slices: usize,
}

fn default_lattice() -> usize {
    8
}

fn default_slices() -> usize {
    16
}

impl Default for ExportSpec {
    fn default() -> Self {
        Self {
            lattice: default_lattice(),
            slices: default_slices(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<IdentitySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub solver: IbvpSolver,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dependence: Option<DependenceSpec>,
    #[serde(default)]
    pub checks: ChecksSpec,
    #[serde(default)]
    pub export: ExportSpec,
}

fn require<'a, T>(v: &'a Option<T>, key: &str, kind: &str) -> Result<&'a T, RunError> {
    v.as_ref()
        .ok_or_else(|| RunError::Schema(format!("missing key '{key}' (required by scenario {kind})")))
}

fn forbid<T>(v: &Option<T>, key: &str, kind: &str) -> Result<(), RunError> {
    match v {
        Some(_) => Err(RunError::Schema(format!("key '{key}' does not apply to scenario {kind}"))),
        None => Ok(()),
    }
}

fn check_order(a: f64, key: &str) -> Result<(), RunError> {
    if a > 0.0 && a <= 1.0 {
        Ok(())
    } else {
        Err(RunError::Schema(format!("{key}: order {a} outside (0, 1]")))
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, RunError> {
        let cfg: Self = toml::from_str(text).map_err(|e| RunError::Schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<(Self, String), RunError> {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::Schema(format!("{}: {e}", path.display())))?;
        Ok((Self::parse(&text)?, text))
    }

    pub fn kind_name(&self) -> &'static str {
        ScenarioKind::ALL[self.scenario as usize]
    }

    pub fn steps(&self) -> Result<usize, RunError> {
        self.grid
            .steps
            .ok_or_else(|| RunError::Schema(format!("missing key 'grid.N' (required by scenario {})", self.kind_name())))
    }

    pub fn alpha(&self) -> Result<f64, RunError> {
        require(&self.alpha, "alpha", self.kind_name()).copied()
    }

    /// Output directory: the `output` key, else `<stem>-out`, both relative
    /// to the config file's directory.
    pub fn output_dir(&self, config_path: &Path) -> PathBuf {
        Self::output_dir_from(self.output.as_deref(), config_path)
    }

    pub fn output_dir_from(output: Option<&Path>, config_path: &Path) -> PathBuf {
        let base = config_path.parent().unwrap_or(Path::new("."));
        match output {
            Some(p) if p.is_absolute() => p.to_path_buf(),
            Some(p) => base.join(p),
            None => {
                let stem = config_path.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
                base.join(format!("{stem}-out"))
            }
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let kind = self.kind_name();
        if !(self.grid.horizon > 0.0 && self.grid.horizon.is_finite()) {
            return Err(RunError::Schema(format!("grid.T must be positive, got {}", self.grid.horizon)));
        }
        if self.grid.steps == Some(0) {
            return Err(RunError::Schema("grid.N must be at least 1".into()));
        }
        if let Some(a) = self.alpha {
            check_order(a, "alpha")?;
        }
        match self.solver {
            IbvpSolver::PredictorCorrector { passes: 0 } => {
                return Err(RunError::Schema("solver.passes must be at least 1".into()))
            }
            IbvpSolver::Picard { tol, max_outer } if !(tol > 0.0) || max_outer == 0 => {
                return Err(RunError::Schema("solver.tol must be positive and solver.max_outer at least 1".into()))
            }
            _ => {}
        }
        if self.export.lattice == 0 || self.export.slices == 0 {
            return Err(RunError::Schema("export.lattice and export.slices must be at least 1".into()));
        }
        let c = &self.checks;
        let applicable: &[(&str, bool)] = &[
            ("checks.identity_residual", c.identity_residual.is_some()),
            ("checks.inequality_margin", c.inequality_margin.is_some()),
            ("checks.square_margin", c.square_margin.is_some()),
            ("checks.max_error", c.max_error.is_some()),
            ("checks.residual", c.residual.is_some()),
            ("checks.estimate_1", c.estimate_1.is_some()),
            ("checks.estimate_2", c.estimate_2.is_some()),
            ("checks.equivalence", c.equivalence.is_some()),
            ("checks.energy_drift", c.energy_drift.is_some()),
            ("checks.min_order", c.min_order.is_some()),
            ("checks.max_order", c.max_order.is_some()),
            ("checks.monotone", c.monotone.is_some()),
            ("checks.linearity", c.linearity.is_some()),
        ];
        let allowed: &[&str] = match self.scenario {
            ScenarioKind::IdentitySuite => &["checks.identity_residual", "checks.inequality_margin", "checks.square_margin"],
            ScenarioKind::FodeOracle => &["checks.max_error", "checks.residual"],
            ScenarioKind::Ibvp => &["checks.estimate_1", "checks.estimate_2", "checks.equivalence", "checks.energy_drift"],
            ScenarioKind::Convergence => &["checks.min_order", "checks.max_order", "checks.monotone"],
            ScenarioKind::Dependence => &["checks.monotone", "checks.linearity"],
        };
        for (key, set) in applicable {
            if *set && !allowed.contains(key) {
                return Err(RunError::Schema(format!("key '{key}' does not apply to scenario {kind}")));
            }
        }

        match self.scenario {
            ScenarioKind::IdentitySuite => {
                self.steps()?;
                let id = require(&self.identity, "identity", kind)?;
                if id.alphas.is_empty() {
                    return Err(RunError::Schema("identity.alphas must not be empty".into()));
                }
                for a in &id.alphas {
                    check_order(*a, "identity.alphas")?;
                }
                forbid(&self.model, "model", kind)?;
                forbid(&self.oracle, "oracle", kind)?;
            }
            ScenarioKind::FodeOracle => {
                self.steps()?;
                self.validate_oracle()?;
                forbid(&self.model, "model", kind)?;
            }
            ScenarioKind::Ibvp => {
                self.steps()?;
                self.alpha()?;
                self.validate_model()?;
            }
            ScenarioKind::Convergence => {
                let conv = require(&self.convergence, "convergence", kind)?;
                if conv.ladder.len() < 3 {
                    return Err(RunError::Schema(format!(
                        "convergence.ladder needs at least 3 rungs, got {}",
                        conv.ladder.len()
                    )));
                }
                if conv.ladder[0] == 0 || conv.ladder.windows(2).any(|w| w[1] != 2 * w[0]) {
                    return Err(RunError::Schema("convergence.ladder rungs must each double the last".into()));
                }
                forbid(&self.grid.steps, "grid.N", kind)?;
                match conv.target {
                    ConvergenceTarget::Oracle => {
                        self.validate_oracle()?;
                        forbid(&self.model, "model", kind)?;
                    }
                    ConvergenceTarget::Ibvp => {
                        self.alpha()?;
                        self.validate_model()?;
                        if conv.reference == Some(Reference::ClosedForm) {
                            return Err(RunError::Schema("convergence.reference: the ibvp target has no closed form".into()));
                        }
                    }
                }
            }
            ScenarioKind::Dependence => {
                self.steps()?;
                self.alpha()?;
                self.validate_model()?;
                let dep = require(&self.dependence, "dependence", kind)?;
                if dep.scales.is_empty() || dep.scales.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
                    return Err(RunError::Schema("dependence.scales must be non-empty, finite and non-negative".into()));
                }
            }
        }
        Ok(())
    }

    fn validate_oracle(&self) -> Result<(), RunError> {
        let kind = self.kind_name();
        let o = require(&self.oracle, "oracle", kind)?;
        check_order(o.orders[0], "oracle.orders")?;
        check_order(o.orders[1], "oracle.orders")?;
        match o.case {
            OracleCase::A1 => {
                require(&o.lambda, "oracle.lambda", kind)?;
                require(&o.mu, "oracle.mu", kind)?;
            }
            OracleCase::A2 => {
                require(&o.lambda, "oracle.lambda", kind)?;
                forbid(&o.mu, "oracle.mu", "fode-oracle case a2")?;
            }
            OracleCase::A3Rotation => {
                require(&o.mu, "oracle.mu", kind)?;
                forbid(&o.lambda, "oracle.lambda", "fode-oracle case a3-rotation")?;
                if o.orders[0] + o.orders[1] > 1.0 {
                    return Err(RunError::Schema("oracle.orders: the rotation case needs an order sum at most 1".into()));
                }
            }
        }
        Ok(())
    }

    fn validate_model(&self) -> Result<(), RunError> {
        let model = require(&self.model, "model", self.kind_name())?;
        if model.m == 0 {
            return Err(RunError::Schema("model.m must be at least 1".into()));
        }
        model.coefficients()?;
        model.data()?;
        forbid(&self.oracle, "oracle", self.kind_name())
    }
}
