use nalgebra::{DMatrix, DVector};

use super::picard::weight_tables;
use super::{LinearBlockSystem, SolutionTrajectory, SolveError, SolverMetadata};
use crate::fraccalc::TimeGrid;

/// Product-trapezoid scheme for x' = A x (per-component Caputo orders) with
/// the newest sample taken implicitly. Each step solves
/// (I - diag(w) A) x_n = ξ + history, which is the fixed point the Picard
/// iteration and an iterated corrector converge to, without their step-size
/// restriction. The matrix is factored once per grid.
pub fn solve_linear_implicit(
    sys: &LinearBlockSystem,
    xi: &[f64],
    grid: &TimeGrid,
) -> Result<SolutionTrajectory, SolveError> {
    let p = sys.clone().into_problem(xi.to_vec(), grid.horizon())?;
    let n = p.dim();
    let len = grid.len();
    let h = grid.step();
    let a = sys.matrix();
    let (slots, tables) = weight_tables(&p, grid);
    let classical: Vec<bool> = p.orders().iter().map(|o| o.is_one()).collect();
    let newest: Vec<f64> = (0..n)
        .map(|j| if classical[j] { 0.5 * h } else { tables[slots[j]].newest_weight() })
        .collect();
    let system = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - newest[i] * a[(i, j)]);
    let lu = system.lu();
    if !lu.is_invertible() {
        return Err(SolveError::InvalidProblem("implicit step matrix is singular".into()));
    }

    let mut states = Vec::with_capacity(len);
    let mut caputo = Vec::with_capacity(len);
    let mut history = vec![vec![0.0; len]; n];
    let mut running = vec![0.0; n];
    let mut buf = vec![0.0; n];

    states.push(xi.to_vec());
    p.eval(0, 0.0, xi, &mut buf)?;
    for j in 0..n {
        history[j][0] = buf[j];
    }
    caputo.push(buf.clone());

    let mut rhs = DVector::zeros(n);
    for step in 1..len {
        for j in 0..n {
            let known = if classical[j] {
                0.5 * h * (history[j][0] + 2.0 * running[j])
            } else {
                tables[slots[j]].corrector(&history[j], step, 0.0)
            };
            rhs[j] = xi[j] + known;
        }
        let x = lu.solve(&rhs).ok_or_else(|| SolveError::InvalidProblem("implicit solve failed".into()))?;
        let x: Vec<f64> = x.iter().copied().collect();
        p.eval(step, grid.node(step), &x, &mut buf)?;
        for j in 0..n {
            history[j][step] = buf[j];
            if classical[j] {
                running[j] += buf[j];
            }
        }
        states.push(x);
        caputo.push(buf.clone());
    }

    Ok(SolutionTrajectory {
        grid: *grid,
        orders: p.orders().iter().map(|o| o.value()).collect(),
        xi: xi.to_vec(),
        states,
        caputo_values: caputo,
        meta: SolverMetadata {
            method: "linear-implicit".into(),
            iterations: 1,
            increments: Vec::new(),
            tolerance: None,
            domain_exit: None,
            certificate: None,
        },
    })
}
