use super::picard::{check_horizon, weight_tables};
use super::{MultiOrderProblem, SolutionTrajectory, SolveError, SolverMetadata};
use crate::fraccalc::TimeGrid;

/// Corrector iteration policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectorOptions {
    /// Maximum corrector passes per step.
    pub passes: usize,
    /// Stop early once a pass changes the state by at most this much
    /// (relative to max(1, |x|)).
    pub tolerance: Option<f64>,
}

impl Default for CorrectorOptions {
    fn default() -> Self {
        Self {
            passes: 1,
            tolerance: None,
        }
    }
}

impl CorrectorOptions {
    /// Iterate the corrector to convergence of the implicit trapezoid scheme.
    pub fn converged() -> Self {
        Self {
            passes: 50,
            tolerance: Some(1e-15),
        }
    }
}

/// Fractional Adams-Bashforth-Moulton with a single corrector pass.
pub fn solve_predictor_corrector(p: &MultiOrderProblem, grid: &TimeGrid) -> Result<SolutionTrajectory, SolveError> {
    solve_predictor_corrector_with(p, grid, CorrectorOptions::default())
}

/// Fractional Adams-Bashforth-Moulton, each component with its own order.
pub fn solve_predictor_corrector_with(
    p: &MultiOrderProblem,
    grid: &TimeGrid,
    opts: CorrectorOptions,
) -> Result<SolutionTrajectory, SolveError> {
    if opts.passes == 0 {
        return Err(SolveError::InvalidProblem("at least one corrector pass is required".into()));
    }
    check_horizon(p, grid)?;
    let n = p.dim();
    let len = grid.len();
    let h = grid.step();
    let xi = p.xi();
    let (slots, tables) = weight_tables(p, grid);
    let classical: Vec<bool> = p.orders().iter().map(|o| o.is_one()).collect();

    let mut states = Vec::with_capacity(len);
    let mut caputo = Vec::with_capacity(len);
    // history[j][k] = f_j at node k
    let mut history = vec![vec![0.0; len]; n];
    // running sums of f_j over nodes 1..k for order-one components
    let mut running = vec![0.0; n];
    let mut buf = vec![0.0; n];

    states.push(xi.to_vec());
    p.eval(0, 0.0, xi, &mut buf)?;
    for j in 0..n {
        history[j][0] = buf[j];
    }
    caputo.push(buf.clone());

    let mut predicted = vec![0.0; n];
    let mut base = vec![0.0; n];
    let mut corrected = vec![0.0; n];
    let mut max_passes = 0;

    for step in 1..len {
        let t = grid.node(step);
        for j in 0..n {
            let hist = &history[j][..step];
            if classical[j] {
                let sum = hist[0] + running[j];
                predicted[j] = xi[j] + h * sum;
                base[j] = hist[0] + 2.0 * running[j];
            } else {
                let w = &tables[slots[j]];
                predicted[j] = xi[j] + w.predictor(hist, step);
                base[j] = f64::NAN;
            }
        }
        p.eval(step, t, &predicted, &mut buf)?;
        let mut passes = 0;
        loop {
            passes += 1;
            let mut change: f64 = 0.0;
            for j in 0..n {
                let v = if classical[j] {
                    xi[j] + 0.5 * h * (base[j] + buf[j])
                } else {
                    xi[j] + tables[slots[j]].corrector(&history[j], step, buf[j])
                };
                let prev = if passes == 1 { predicted[j] } else { corrected[j] };
                change = change.max((v - prev).abs() / v.abs().max(1.0));
                corrected[j] = v;
            }
            p.eval(step, t, &corrected, &mut buf)?;
            let done = match opts.tolerance {
                Some(tol) => change <= tol,
                None => false,
            };
            if done || passes >= opts.passes {
                break;
            }
        }
        max_passes = max_passes.max(passes);
        for j in 0..n {
            history[j][step] = buf[j];
            if classical[j] {
                running[j] += buf[j];
            }
        }
        states.push(corrected.clone());
        caputo.push(buf.clone());
    }

    let mut traj = SolutionTrajectory {
        grid: *grid,
        orders: p.orders().iter().map(|o| o.value()).collect(),
        xi: xi.to_vec(),
        states,
        caputo_values: caputo,
        meta: SolverMetadata {
            method: "predictor-corrector".into(),
            iterations: max_passes,
            increments: Vec::new(),
            tolerance: opts.tolerance,
            domain_exit: None,
            certificate: None,
        },
    };
    traj.record_domain_exit(p.domain());
    Ok(traj)
}
