use std::path::Path;

use fracwave::export::{write_json_file, write_numeric_csv_file};
use fracwave::fode::{
    closed_form_a1, closed_form_a2, closed_form_a3_rotation, residual_profile, solve_linear_implicit, solve_picard,
    solve_predictor_corrector_with, CorrectorOptions, LinearBlockSystem, SolutionTrajectory,
};
use fracwave::fraccalc::{caputo_square_inequality, check_identity_suite_with_derivative, FracOrder, TimeGrid};
use fracwave::galerkin::{
    check_order_equivalence, continuous_dependence_experiment, energy_estimate_2, solve_ibvp, DataClass, GalerkinModel,
    IbvpSolver,
};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{ConvergenceTarget, OracleCase, OracleSpec, Reference, ScenarioConfig, ScenarioKind};
use crate::{CheckResult, RunError};

pub(crate) struct Outcome {
    pub checks: Vec<CheckResult>,
    pub summary: serde_json::Value,
}

pub(crate) fn execute(cfg: &ScenarioConfig, dir: &Path) -> Result<Outcome, RunError> {
    match cfg.scenario {
        ScenarioKind::IdentitySuite => identity_suite(cfg, dir),
        ScenarioKind::FodeOracle => fode_oracle(cfg, dir),
        ScenarioKind::Ibvp => ibvp(cfg, dir),
        ScenarioKind::Convergence => convergence(cfg, dir),
        ScenarioKind::Dependence => dependence(cfg, dir),
    }
}

fn csv(dir: &Path, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<(), RunError> {
    let path = dir.join(name);
    let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    write_numeric_csv_file(&path, &header, rows).map_err(|e| RunError::export(&path, e))
}

fn json_file<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), RunError> {
    let path = dir.join(name);
    write_json_file(&path, value).map_err(|e| RunError::export(&path, e))
}

fn order(a: f64) -> Result<FracOrder, RunError> {
    FracOrder::new(a).map_err(|e| RunError::Schema(e.to_string()))
}

fn identity_suite(cfg: &ScenarioConfig, dir: &Path) -> Result<Outcome, RunError> {
    let spec = cfg.identity.as_ref().expect("validated");
    let grid = TimeGrid::new(cfg.grid.horizon, cfg.steps()?)?;
    let f = grid.sample(|t| spec.function.eval(t));
    let df = grid.sample(|t| spec.function.derivative(t));
    let residual_tol = cfg.checks.identity_residual.unwrap_or(1e-5);
    let margin_tol = cfg.checks.inequality_margin.unwrap_or(1e-12);
    let square_tol = cfg.checks.square_margin.unwrap_or(1e-4);

    let mut checks = Vec::new();
    let mut reports = Vec::new();
    let mut columns = Vec::new();
    for &a in &spec.alphas {
        let alpha = order(a)?;
        let r = check_identity_suite_with_derivative(&f, &df, alpha)?;
        let square = caputo_square_inequality(&f, alpha)?;
        let square_min = square.values()[1..].iter().cloned().fold(f64::INFINITY, f64::min);
        checks.push(CheckResult::at_most(format!("alpha={a}: inversion_residual"), r.inversion_residual, residual_tol));
        checks.push(CheckResult::at_most(format!("alpha={a}: flux_residual"), r.flux_residual, residual_tol));
        checks.push(CheckResult::at_most(format!("alpha={a}: derivative_residual"), r.derivative_residual, residual_tol));
        checks.push(CheckResult::at_most(format!("alpha={a}: semigroup_residual"), r.semigroup_residual, residual_tol));
        if let Some(m) = r.integral_comparison_margin {
            checks.push(CheckResult::at_least(format!("alpha={a}: integral_comparison_margin"), m, -margin_tol));
        }
        checks.push(CheckResult::at_least(format!("alpha={a}: square_bound_margin"), r.square_bound_margin, -margin_tol));
        if square.values().len() > 1 {
            checks.push(CheckResult::at_least(format!("alpha={a}: square_inequality_min"), square_min, -square_tol));
        }
        reports.push(json!({ "report": r, "square_inequality_min": square_min }));
        columns.push(square.values().to_vec());
    }
    json_file(
        dir,
        "identity_report.json",
        &json!({
            "function": spec.function,
            "T": cfg.grid.horizon,
            "N": grid.steps(),
            "thresholds": { "residual": residual_tol, "margin": margin_tol, "square": square_tol },
            "alphas": reports,
        }),
    )?;
    let mut header = vec!["t".to_string()];
    header.extend(spec.alphas.iter().map(|a| format!("margin_{a}")));
    let rows: Vec<Vec<f64>> = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(k, &t)| std::iter::once(t).chain(columns.iter().map(|c| c[k])).collect())
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv(dir, "square_inequality.csv", &header, &rows)?;
    Ok(Outcome {
        checks,
        summary: json!({ "function": spec.function }),
    })
}

fn oracle_system(o: &OracleSpec) -> Result<LinearBlockSystem, RunError> {
    let m = match o.case {
        OracleCase::A1 => [o.lambda.unwrap_or(0.0), 0.0, 0.0, o.mu.unwrap_or(0.0)],
        OracleCase::A2 => {
            let l = o.lambda.unwrap_or(0.0);
            [l, 1.0, 0.0, l]
        }
        OracleCase::A3Rotation => {
            let mu = o.mu.unwrap_or(0.0);
            [0.0, mu, -mu, 0.0]
        }
    };
    let orders = vec![order(o.orders[0])?, order(o.orders[1])?];
    Ok(LinearBlockSystem::new(DMatrix::from_row_slice(2, 2, &m), orders)?)
}

fn oracle_solution(o: &OracleSpec, grid: &TimeGrid) -> Result<SolutionTrajectory, RunError> {
    let orders = (o.orders[0], o.orders[1]);
    Ok(match o.case {
        OracleCase::A1 => closed_form_a1(o.lambda.unwrap_or(0.0), o.mu.unwrap_or(0.0), orders, o.xi, grid)?,
        OracleCase::A2 => closed_form_a2(o.lambda.unwrap_or(0.0), orders, o.xi, grid)?,
        OracleCase::A3Rotation => closed_form_a3_rotation(o.mu.unwrap_or(0.0), orders, o.xi, grid)?,
    })
}

fn solve_linear(
    sys: &LinearBlockSystem,
    xi: &[f64],
    grid: &TimeGrid,
    solver: IbvpSolver,
) -> Result<SolutionTrajectory, RunError> {
    if solver == IbvpSolver::Implicit {
        return Ok(solve_linear_implicit(sys, xi, grid)?);
    }
    let p = sys.clone().into_problem(xi.to_vec(), grid.horizon())?;
    Ok(match solver {
        IbvpSolver::Implicit => unreachable!(),
        IbvpSolver::PredictorCorrector { passes } => solve_predictor_corrector_with(
            &p,
            grid,
            CorrectorOptions {
                passes,
                tolerance: None,
            },
        )?,
        IbvpSolver::Picard { tol, max_outer } => solve_picard(&p, grid, tol, max_outer)?,
    })
}

fn fode_oracle(cfg: &ScenarioConfig, dir: &Path) -> Result<Outcome, RunError> {
    let o = cfg.oracle.as_ref().expect("validated");
    let grid = TimeGrid::new(cfg.grid.horizon, cfg.steps()?)?;
    let sys = oracle_system(o)?;
    let traj = solve_linear(&sys, &o.xi, &grid, cfg.solver)?;
    let exact = oracle_solution(o, &grid)?;
    let p = sys.into_problem(o.xi.to_vec(), grid.horizon())?;
    let residuals = residual_profile(&traj, &p)?;
    let residual = residuals.iter().cloned().fold(0.0, f64::max);

    let path = dir.join("trajectory.csv");
    traj.write_csv_file(&path, &residuals).map_err(|e| RunError::export(&path, e))?;
    let path = dir.join("solver.json");
    traj.write_metadata_file(&path, Some(residual)).map_err(|e| RunError::export(&path, e))?;

    let mut max_error = 0.0_f64;
    let rows: Vec<Vec<f64>> = grid
        .nodes()
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let (x, e) = (&traj.states[k], &exact.states[k]);
            let (e1, e2) = ((x[0] - e[0]).abs(), (x[1] - e[1]).abs());
            max_error = max_error.max(e1).max(e2);
            vec![t, e[0], e[1], e1, e2, e1.max(e2)]
        })
        .collect();
    csv(dir, "oracle.csv", &["t", "exact_1", "exact_2", "error_1", "error_2", "max_error"], &rows)?;
    let end = rows.last().map(|r| r[5]).unwrap_or(0.0);

    let mut checks = vec![CheckResult::at_most("max_error", max_error, cfg.checks.max_error.unwrap_or(1e-4))];
    if let Some(tol) = cfg.checks.residual {
        checks.push(CheckResult::at_most("integral_equation_residual", residual, tol));
    }
    Ok(Outcome {
        checks,
        summary: json!({
            "method": traj.meta.method,
            "max_error": max_error,
            "end_error": end,
            "residual": residual,
            "certificate": traj.meta.certificate,
        }),
    })
}

fn build_model(cfg: &ScenarioConfig) -> Result<GalerkinModel, RunError> {
    let spec = cfg.model.as_ref().expect("validated");
    Ok(GalerkinModel::build(spec.m, spec.coefficients()?, spec.data()?)?)
}

fn ibvp(cfg: &ScenarioConfig, dir: &Path) -> Result<Outcome, RunError> {
    let model = build_model(cfg)?;
    let alpha = order(cfg.alpha()?)?;
    let grid = TimeGrid::new(cfg.grid.horizon, cfg.steps()?)?;
    let sol = solve_ibvp(&model, alpha, &grid, cfg.solver)?;

    let path = dir.join("model.json");
    model.write_json(&path).map_err(|e| RunError::export(&path, e))?;
    let path = dir.join("energy.csv");
    sol.report.write_csv_file(&path).map_err(|e| RunError::export(&path, e))?;
    let stride = (grid.steps() / cfg.export.slices).max(1);
    let path = dir.join("u_field.csv");
    sol.write_u_field_file(&model, &path, cfg.export.lattice, stride)
        .map_err(|e| RunError::export(&path, e))?;
    let path = dir.join("delta_field.csv");
    sol.write_delta_field_file(&model, &path, cfg.export.lattice, stride)
        .map_err(|e| RunError::export(&path, e))?;

    let est1 = sol.report.est1_margin.iter().cloned().fold(f64::INFINITY, f64::min);
    let est2 = energy_estimate_2(&sol.report, &model);
    let equivalence = check_order_equivalence(&sol)?;
    let drift = sol.report.relative_drift();
    let in_span = model.data_class == DataClass::InSpan && !model.delta1_overridden();
    json_file(
        dir,
        "estimates.json",
        &json!({
            "alpha": alpha.value(),
            "data_class": model.data_class,
            "delta1_overridden": model.delta1_overridden(),
            "estimate_1_min_margin": est1,
            "estimate_2": est2,
            "equivalence": equivalence,
            "energy_drift": drift,
        }),
    )?;

    let mut checks = vec![CheckResult::at_least(
        "estimate_1_min_margin",
        est1,
        -cfg.checks.estimate_1.unwrap_or(1e-3),
    )];
    if cfg.checks.estimate_2.unwrap_or(true) {
        checks.push(CheckResult::at_least("estimate_2_min_margin", est2.min_margin, 0.0));
        if in_span {
            let scale = est2.laplacian_sq.sqrt().max(1.0);
            checks.push(CheckResult::at_most("estimate_2_initial_gap", est2.initial_gap, 1e-10 * scale));
        }
    }
    if let Some(tol) = cfg.checks.equivalence {
        checks.push(CheckResult::at_most("equivalence_residual", equivalence.residual, tol));
    }
    if let Some(tol) = cfg.checks.energy_drift {
        checks.push(CheckResult::at_most("energy_drift", drift, tol));
    }
    Ok(Outcome {
        checks,
        summary: json!({
            "m": model.m(),
            "method": sol.trajectory.meta.method,
            "data_class": model.data_class,
            "quadrature_points": model.quadrature_points,
            "equivalence_tail_residual": equivalence.tail_residual,
        }),
    })
}

/// Sup over shared nodes and components, and the same at the final node.
fn distance(coarse: &SolutionTrajectory, fine: &SolutionTrajectory) -> (f64, f64) {
    let stride = fine.grid.steps() / coarse.grid.steps();
    let mut sup = 0.0_f64;
    let mut end = 0.0_f64;
    for (k, x) in coarse.states.iter().enumerate() {
        let y = &fine.states[k * stride];
        let d = x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        sup = sup.max(d);
        if k == coarse.grid.steps() {
            end = d;
        }
    }
    (sup, end)
}

/// Least-squares slope of log(error) against log(h).
fn fitted_order(hs: &[f64], errs: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = hs
        .iter()
        .zip(errs)
        .filter(|(_, e)| **e > 0.0)
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn convergence(cfg: &ScenarioConfig, dir: &Path) -> Result<Outcome, RunError> {
    let spec = cfg.convergence.as_ref().expect("validated");
    let horizon = cfg.grid.horizon;
    let grids = spec
        .ladder
        .iter()
        .map(|&n| TimeGrid::new(horizon, n))
        .collect::<Result<Vec<_>, _>>()?;

    let (runs, reference) = match spec.target {
        ConvergenceTarget::Oracle => {
            let o = cfg.oracle.as_ref().expect("validated");
            let sys = oracle_system(o)?;
            let runs = grids
                .par_iter()
                .map(|g| solve_linear(&sys, &o.xi, g, cfg.solver))
                .collect::<Result<Vec<_>, _>>()?;
            (runs, spec.reference.unwrap_or(Reference::ClosedForm))
        }
        ConvergenceTarget::Ibvp => {
            let model = build_model(cfg)?;
            let alpha = order(cfg.alpha()?)?;
            let runs = grids
                .par_iter()
                .map(|g| solve_ibvp(&model, alpha, g, cfg.solver).map(|s| s.trajectory))
                .collect::<Result<Vec<_>, _>>()?;
            (runs, Reference::Finest)
        }
    };

    let errors: Vec<(f64, f64)> = match reference {
        Reference::ClosedForm => {
            let o = cfg.oracle.as_ref().expect("validated");
            grids
                .par_iter()
                .zip(&runs)
                .map(|(g, run)| oracle_solution(o, g).map(|exact| distance(run, &exact)))
                .collect::<Result<Vec<_>, _>>()?
        }
        Reference::Finest => {
            let finest = runs.last().expect("at least three rungs");
            runs[..runs.len() - 1].iter().map(|r| distance(r, finest)).collect()
        }
    };

    let hs: Vec<f64> = grids[..errors.len()].iter().map(|g| g.step()).collect();
    let mut rows = Vec::new();
    for (i, &(sup, end)) in errors.iter().enumerate() {
        let (so, eo) = if i == 0 {
            (f64::NAN, f64::NAN)
        } else {
            let (ps, pe) = errors[i - 1];
            ((ps / sup).log2(), (pe / end).log2())
        };
        rows.push(vec![grids[i].steps() as f64, hs[i], sup, end, so, eo]);
    }
    csv(dir, "rates.csv", &["steps", "h", "sup_error", "end_error", "sup_order", "end_order"], &rows)?;

    let sups: Vec<f64> = errors.iter().map(|e| e.0).collect();
    let ends: Vec<f64> = errors.iter().map(|e| e.1).collect();
    let sup_order = fitted_order(&hs, &sups);
    let end_order = fitted_order(&hs, &ends);
    let mut checks = Vec::new();
    if cfg.checks.monotone.unwrap_or(true) {
        let worst = sups.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
        checks.push(CheckResult::at_most("largest_error_ratio_between_rungs", worst, 1.0));
    }
    if let Some(min) = cfg.checks.min_order {
        checks.push(CheckResult::at_least("fitted_sup_order", sup_order, min));
    }
    if let Some(max) = cfg.checks.max_order {
        checks.push(CheckResult::at_most("fitted_sup_order", sup_order, max));
    }
    Ok(Outcome {
        checks,
        summary: json!({
            "reference": reference,
            "fitted_sup_order": sup_order,
            "fitted_end_order": end_order,
        }),
    })
}

fn dependence(cfg: &ScenarioConfig, dir: &Path) -> Result<Outcome, RunError> {
    let spec = cfg.dependence.as_ref().expect("validated");
    let model = build_model(cfg)?;
    let alpha = order(cfg.alpha()?)?;
    let grid = TimeGrid::new(cfg.grid.horizon, cfg.steps()?)?;
    let rows = continuous_dependence_experiment(&model, &spec.perturbation, &spec.scales, alpha, &grid, cfg.solver)?;

    let path = dir.join("model.json");
    model.write_json(&path).map_err(|e| RunError::export(&path, e))?;
    let table: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.scale, r.d_u, r.d_delta, r.d_total]).collect();
    csv(dir, "dependence.csv", &["scale", "D_u", "D_delta", "D_total"], &table)?;

    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| b.scale.total_cmp(&a.scale));
    let mut checks = Vec::new();
    if let Some(zero) = sorted.iter().find(|r| r.scale == 0.0) {
        checks.push(CheckResult::at_most("D(0)", zero.d_total, 0.0));
    }
    if cfg.checks.monotone.unwrap_or(true) {
        let worst = sorted
            .windows(2)
            .map(|w| w[1].d_total - w[0].d_total)
            .fold(f64::NEG_INFINITY, f64::max);
        if sorted.len() > 1 {
            checks.push(CheckResult::at_most("largest_increase_as_scale_shrinks", worst, 0.0));
        }
    }
    if let Some([lo, hi]) = cfg.checks.linearity {
        let positive: Vec<_> = sorted.iter().filter(|r| r.scale > 0.0).collect();
        if positive.len() < 2 {
            return Err(RunError::Schema("checks.linearity needs two positive scales".into()));
        }
        let (a, b) = (positive[0], positive[1]);
        let ratio = b.d_total / a.d_total;
        let name = format!("D({})/D({})", b.scale, a.scale);
        checks.push(CheckResult::at_least(format!("{name} lower"), ratio, lo));
        checks.push(CheckResult::at_most(format!("{name} upper"), ratio, hi));
    }
    Ok(Outcome {
        checks,
        summary: json!({ "rows": rows }),
    })
}
