use super::{MultiOrderProblem, SolutionTrajectory, SolveError};
use crate::fraccalc::rl_integral_values;

/// Per-node max over components of |φ_j - ξ_j - J^{α_j}[f_j(φ, ·)]|.
pub fn residual_profile(traj: &SolutionTrajectory, p: &MultiOrderProblem) -> Result<Vec<f64>, SolveError> {
    let n = p.dim();
    if traj.dim() != n {
        return Err(SolveError::InvalidProblem("trajectory and problem dimensions differ".into()));
    }
    let grid = traj.grid;
    let mut fvals = vec![vec![0.0; grid.len()]; n];
    let mut buf = vec![0.0; n];
    for (k, state) in traj.states.iter().enumerate() {
        p.eval(k, grid.node(k), state, &mut buf)?;
        for j in 0..n {
            fvals[j][k] = buf[j];
        }
    }
    let mut profile = vec![0.0_f64; grid.len()];
    for j in 0..n {
        let integral = rl_integral_values(&fvals[j], grid.step(), p.orders()[j]);
        for k in 0..grid.len() {
            let r = (traj.states[k][j] - p.xi()[j] - integral[k]).abs();
            profile[k] = profile[k].max(r);
        }
    }
    Ok(profile)
}

/// Max over nodes and components of the integral-equation residual.
pub fn residual_check(traj: &SolutionTrajectory, p: &MultiOrderProblem) -> Result<f64, SolveError> {
    Ok(residual_profile(traj, p)?.into_iter().fold(0.0, f64::max))
}
