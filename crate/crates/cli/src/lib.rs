//! Scenario runner behind the `fracwave` binary.

pub mod config;
pub mod manifest;
mod scenario;

use std::path::{Path, PathBuf};
use std::time::Instant;

use fracwave::export::ExportError;
use fracwave::fode::SolveError;
use fracwave::fraccalc::FracError;
use fracwave::galerkin::GalerkinError;
use thiserror::Error;

pub use config::ScenarioConfig;
pub use manifest::{CheckResult, RunManifest};

/// Everything a run may leave in its output directory. Stale copies are
/// removed before each run so the manifest describes this run only.
pub const ARTIFACT_NAMES: [&str; 16] = [
    "manifest.json",
    "error.log",
    "identity_report.json",
    "square_inequality.csv",
    "trajectory.csv",
    "oracle.csv",
    "solver.json",
    "model.json",
    "energy.csv",
    "u_field.csv",
    "delta_field.csv",
    "estimates.json",
    "rates.csv",
    "dependence.csv",
    "rungs.json",
    "base_energy.csv",
];

#[derive(Debug, Error)]
pub enum RunError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("i/o failure on {path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl From<SolveError> for RunError {
    fn from(e: SolveError) -> Self {
        Self::Solver(e.to_string())
    }
}

impl From<GalerkinError> for RunError {
    fn from(e: GalerkinError) -> Self {
        Self::Solver(e.to_string())
    }
}

impl From<FracError> for RunError {
    fn from(e: FracError) -> Self {
        Self::Solver(e.to_string())
    }
}

impl RunError {
    pub(crate) fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }

    pub(crate) fn export(path: &Path, e: ExportError) -> Self {
        Self::io(path, e)
    }
}

/// Process exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    CheckFailure = 1,
    Schema = 2,
    Failure = 3,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }

    fn of(e: &RunError) -> Self {
        match e {
            RunError::Schema(_) => Self::Schema,
            RunError::Solver(_) | RunError::Io { .. } => Self::Failure,
        }
    }
}

#[derive(Debug)]
pub struct RunReport {
    pub exit: Exit,
    pub output: PathBuf,
    pub message: String,
}

fn clear_artifacts(dir: &Path) -> Result<(), RunError> {
    for name in ARTIFACT_NAMES {
        let p = dir.join(name);
        if p.is_file() {
            std::fs::remove_file(&p).map_err(|e| RunError::io(&p, e))?;
        }
    }
    Ok(())
}

fn prepare_dir(dir: &Path) -> Result<(), RunError> {
    std::fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;
    clear_artifacts(dir)
}

fn write_error_log(dir: &Path, e: &RunError) -> String {
    let path = dir.join("error.log");
    let text = format!("{e}\n");
    match std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, &text)) {
        Ok(()) => format!("{e} (see {})", path.display()),
        Err(io) => format!("{e} (error log not written: {io})"),
    }
}

/// Output directory for a config that failed to parse: its `output` key if
/// that much can be read, otherwise the default.
fn fallback_output(config_path: &Path) -> PathBuf {
    let output = std::fs::read_to_string(config_path)
        .ok()
        .and_then(|t| t.parse::<toml::Table>().ok())
        .and_then(|t| t.get("output").and_then(|v| v.as_str()).map(PathBuf::from));
    ScenarioConfig::output_dir_from(output.as_deref(), config_path)
}

/// Schema check only; no files are touched.
pub fn validate(config_path: &Path) -> Result<ScenarioConfig, RunError> {
    ScenarioConfig::load(config_path).map(|(cfg, _)| cfg)
}

/// Runs one config end to end and writes the manifest last.
pub fn run(config_path: &Path) -> RunReport {
    let start = Instant::now();
    let (cfg, text) = match ScenarioConfig::load(config_path) {
        Ok(v) => v,
        Err(e) => {
            let dir = fallback_output(config_path);
            if let Err(io) = prepare_dir(&dir) {
                return RunReport {
                    exit: Exit::of(&io),
                    output: dir,
                    message: io.to_string(),
                };
            }
            let message = write_error_log(&dir, &e);
            return RunReport {
                exit: Exit::of(&e),
                output: dir,
                message,
            };
        }
    };
    let dir = cfg.output_dir(config_path);
    if let Err(e) = prepare_dir(&dir) {
        return RunReport {
            exit: Exit::of(&e),
            output: dir,
            message: e.to_string(),
        };
    }

    let outcome = scenario::execute(&cfg, &dir);
    let scenario_ms = start.elapsed().as_secs_f64() * 1e3;
    let (exit, status, checks, summary, mut message) = match outcome {
        Ok(o) => {
            let failed: Vec<&CheckResult> = o.checks.iter().filter(|c| !c.pass).collect();
            let message = if failed.is_empty() {
                format!("{} checks passed", o.checks.len())
            } else {
                failed.iter().map(|c| c.describe()).collect::<Vec<_>>().join("\n")
            };
            let exit = if failed.is_empty() { Exit::Pass } else { Exit::CheckFailure };
            let status = if failed.is_empty() { "pass" } else { "check-failure" };
            (exit, status, o.checks, o.summary, message)
        }
        Err(e) => {
            let message = write_error_log(&dir, &e);
            (Exit::of(&e), "failure", Vec::new(), serde_json::Value::Null, message)
        }
    };

    match RunManifest::build(&cfg, &text, &dir, status, checks, summary, scenario_ms, start) {
        Ok(m) => {
            if let Err(e) = m.write(&dir) {
                return RunReport {
                    exit: Exit::Failure,
                    output: dir,
                    message: e.to_string(),
                };
            }
        }
        Err(e) => {
            message = format!("{message}\n{e}");
            return RunReport {
                exit: Exit::Failure,
                output: dir,
                message,
            };
        }
    }
    RunReport {
        exit,
        output: dir,
        message,
    }
}

/// Names accepted wherever a preset is referenced.
pub fn preset_listing() -> String {
    use fracwave::galerkin::{CoefficientField, InitialData};
    let rows = [
        ("scenarios", config::ScenarioKind::ALL.join(", ")),
        ("coefficient presets (f, g, h)", CoefficientField::PRESETS.join(", ")),
        ("initial-data presets", InitialData::PRESETS.join(", ")),
        ("identity functions", config::TestFunction::ALL.join(", ")),
        ("oracle cases", config::OracleCase::ALL.join(", ")),
        ("solvers", "implicit, predictor-corrector, picard".to_string()),
    ];
    rows.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
}
