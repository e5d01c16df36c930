use serde::Serialize;

use super::{Block, GalerkinError, IbvpSolution};
use crate::fraccalc::{caputo_values, rl_integral_values, FracOrder};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// max over interior nodes and modes of |ᶜD^{1+α}a - ᶜDᵅ a'|
    pub residual: f64,
    pub node: usize,
    pub mode: usize,
    /// same maximum restricted to t >= T/10, away from the start-up layer
    pub tail_residual: f64,
}

/// Compares ᶜD^{1+α} of the displacement coefficients, taken as the central
/// second difference of J^{1-α}[a - a(0) - t a'(0)], with the L1 Caputo
/// derivative of the velocity coefficients, at nodes 1..N-1.
pub fn check_order_equivalence(sol: &IbvpSolution) -> Result<EquivalenceReport, GalerkinError> {
    let grid = sol.grid();
    if grid.steps() < 2 {
        return Err(GalerkinError::InvalidInput("the equivalence check needs at least two steps".into()));
    }
    let h = grid.step();
    let t = grid.nodes();
    let alpha = sol.alpha;
    let mut out = EquivalenceReport {
        residual: 0.0,
        node: 0,
        mode: 0,
        tail_residual: 0.0,
    };
    let tail_start = grid.steps().div_ceil(10);
    for i in 0..sol.m() {
        let a = sol.series(Block::Displacement, i);
        let y = sol.series(Block::Velocity, i);
        let g: Vec<f64> = (0..a.len()).map(|k| a[k] - a[0] - t[k] * y[0]).collect();
        let f = if alpha.is_one() {
            g
        } else {
            rl_integral_values(&g, h, FracOrder::new(1.0 - alpha.value())?)
        };
        let cd = caputo_values(&y, h, alpha)?;
        for k in 1..a.len() - 1 {
            let second = (f[k + 1] - 2.0 * f[k] + f[k - 1]) / (h * h);
            let r = (second - cd[k]).abs();
            if k >= tail_start {
                out.tail_residual = out.tail_residual.max(r);
            }
            if r > out.residual {
                out.residual = r;
                out.node = k;
                out.mode = i;
            }
        }
    }
    Ok(out)
}
