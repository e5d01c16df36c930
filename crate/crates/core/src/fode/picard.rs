use std::collections::BTreeMap;

use super::{MultiOrderProblem, SolutionTrajectory, SolveError, SolverMetadata};
use crate::fraccalc::{RlWeights, TimeGrid};

pub(crate) fn check_horizon(p: &MultiOrderProblem, grid: &TimeGrid) -> Result<(), SolveError> {
    let (a, b) = (p.horizon(), grid.horizon());
    if (a - b).abs() > 4.0 * f64::EPSILON * a.max(b) {
        return Err(SolveError::InvalidProblem(format!("grid horizon {b} differs from problem horizon {a}")));
    }
    Ok(())
}

/// One weight table per distinct order, keyed by bit pattern.
pub(crate) fn weight_tables(p: &MultiOrderProblem, grid: &TimeGrid) -> (Vec<usize>, Vec<RlWeights>) {
    let mut index = BTreeMap::new();
    let mut tables = Vec::new();
    let slots = p
        .orders()
        .iter()
        .map(|o| {
            *index.entry(o.value().to_bits()).or_insert_with(|| {
                tables.push(RlWeights::new(*o, grid.step(), grid.steps()));
                tables.len() - 1
            })
        })
        .collect();
    (slots, tables)
}

/// Discrete Picard iteration φ ← ξ + J^{α_j}[f_j(φ, ·)] until the sup-node
/// distance between iterates is at most `tol`.
pub fn solve_picard(
    p: &MultiOrderProblem,
    grid: &TimeGrid,
    tol: f64,
    max_outer: usize,
) -> Result<SolutionTrajectory, SolveError> {
    if !(tol > 0.0) {
        return Err(SolveError::InvalidProblem(format!("tolerance {tol}")));
    }
    check_horizon(p, grid)?;
    let n = p.dim();
    let len = grid.len();
    let nodes = grid.nodes();
    let (slots, tables) = weight_tables(p, grid);

    let mut states = vec![p.xi().to_vec(); len];
    let mut fvals = vec![vec![0.0; len]; n];
    let mut caputo = vec![vec![0.0; n]; len];
    let mut buf = vec![0.0; n];
    let mut increments = Vec::new();

    for iteration in 1..=max_outer {
        for k in 0..len {
            p.eval(k, nodes[k], &states[k], &mut buf)?;
            for j in 0..n {
                fvals[j][k] = buf[j];
            }
            caputo[k].copy_from_slice(&buf);
        }
        let mut dist: f64 = 0.0;
        let mut next = states.clone();
        for j in 0..n {
            let integral = tables[slots[j]].apply(&fvals[j]);
            for k in 1..len {
                let v = p.xi()[j] + integral[k];
                dist = dist.max((v - states[k][j]).abs());
                next[k][j] = v;
            }
        }
        states = next;
        increments.push(dist);
        if !dist.is_finite() {
            return Err(SolveError::NonConvergence {
                iterations: iteration,
                last_increment: dist,
            });
        }
        if dist <= tol {
            for k in 0..len {
                p.eval(k, nodes[k], &states[k], &mut buf)?;
                caputo[k].copy_from_slice(&buf);
            }
            let mut traj = SolutionTrajectory {
                grid: *grid,
                orders: p.orders().iter().map(|o| o.value()).collect(),
                xi: p.xi().to_vec(),
                states,
                caputo_values: caputo,
                meta: SolverMetadata {
                    method: "picard".into(),
                    iterations: iteration,
                    increments,
                    tolerance: Some(tol),
                    domain_exit: None,
                    // reported when it exists; a solve may converge without it
                    certificate: super::contraction_certificate(p, grid).ok(),
                },
            };
            traj.record_domain_exit(p.domain());
            return Ok(traj);
        }
    }
    Err(SolveError::NonConvergence {
        iterations: max_outer,
        last_increment: increments.last().copied().unwrap_or(f64::NAN),
    })
}
