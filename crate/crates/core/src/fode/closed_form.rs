use super::{SolutionTrajectory, SolveError, SolverMetadata};
use crate::fraccalc::{gamma_fn, MLParams, MittagLeffler, TimeGrid};

const QUAD_TOL: f64 = 1e-11;

fn ml(alpha: f64, beta: f64) -> Result<MittagLeffler, SolveError> {
    Ok(MittagLeffler::new(MLParams::new(alpha, beta))?)
}

fn assemble(grid: &TimeGrid, orders: (f64, f64), xi: [f64; 2], states: Vec<Vec<f64>>, a: [[f64; 2]; 2], label: &str) -> SolutionTrajectory {
    let caputo = states
        .iter()
        .map(|s| vec![a[0][0] * s[0] + a[0][1] * s[1], a[1][0] * s[0] + a[1][1] * s[1]])
        .collect();
    SolutionTrajectory {
        grid: *grid,
        orders: vec![orders.0, orders.1],
        xi: xi.to_vec(),
        states,
        caputo_values: caputo,
        meta: SolverMetadata {
            method: label.into(),
            iterations: 0,
            increments: Vec::new(),
            tolerance: None,
            domain_exit: None,
            certificate: None,
        },
    }
}

fn check_orders(orders: (f64, f64)) -> Result<(), SolveError> {
    for a in [orders.0, orders.1] {
        crate::fraccalc::FracOrder::new(a)?;
    }
    Ok(())
}

/// Diagonal system A = diag(λ, μ): φ = (E_{α₁}(λ t^{α₁}) ξ₁, E_{α₂}(μ t^{α₂}) ξ₂).
pub fn closed_form_a1(
    lambda: f64,
    mu: f64,
    orders: (f64, f64),
    xi: [f64; 2],
    grid: &TimeGrid,
) -> Result<SolutionTrajectory, SolveError> {
    check_orders(orders)?;
    let (e1, e2) = (ml(orders.0, 1.0)?, ml(orders.1, 1.0)?);
    let states = grid
        .nodes()
        .into_iter()
        .map(|t| {
            Ok(vec![
                e1.eval(lambda * t.powf(orders.0))? * xi[0],
                e2.eval(mu * t.powf(orders.1))? * xi[1],
            ])
        })
        .collect::<Result<Vec<_>, SolveError>>()?;
    Ok(assemble(grid, orders, xi, states, [[lambda, 0.0], [0.0, mu]], "closed-form-a1"))
}

/// Jordan-type system A = [[λ, 1], [0, λ]] by the variation-of-constants
/// formula.
pub fn closed_form_a2(
    lambda: f64,
    orders: (f64, f64),
    xi: [f64; 2],
    grid: &TimeGrid,
) -> Result<SolutionTrajectory, SolveError> {
    check_orders(orders)?;
    let (a1, a2) = orders;
    let e1 = ml(a1, 1.0)?;
    let e11 = ml(a1, a1)?;
    let e2 = ml(a2, 1.0)?;
    let mut states = Vec::with_capacity(grid.len());
    for t in grid.nodes() {
        let phi2 = e2.eval(lambda * t.powf(a2))? * xi[1];
        let mut phi1 = e1.eval(lambda * t.powf(a1))? * xi[0];
        if xi[1] != 0.0 && t > 0.0 {
            let g = |s: f64| match (e11.eval(lambda * (t - s).powf(a1)), e2.eval(lambda * s.powf(a2))) {
                (Ok(k), Ok(f)) => k * f,
                _ => f64::NAN,
            };
            let q = weakly_singular_integral_checked(t, 0.0, a1, &g, QUAD_TOL)?;
            phi1 += q * xi[1];
        }
        states.push(vec![phi1, phi2]);
    }
    Ok(assemble(grid, orders, xi, states, [[lambda, 1.0], [0.0, lambda]], "closed-form-a2"))
}

fn weakly_singular_integral_checked(
    t: f64,
    gamma: f64,
    beta: f64,
    g: &dyn Fn(f64) -> f64,
    tol: f64,
) -> Result<f64, SolveError> {
    Ok(super::weakly_singular_integral(t, gamma, beta, g, tol)?.value)
}

/// Rotation system A = [[0, μ], [-μ, 0]] with α₁ + α₂ ≤ 1:
/// φ = E_β(-μ² t^β) ξ + μ ∫_0^t (t-s)^{β-1} E_{β,β}(-μ²(t-s)^β) q(s) ds with
/// β = α₁ + α₂ and q(s) = (s^{-α₂} ξ₂/Γ(1-α₂), -s^{-α₁} ξ₁/Γ(1-α₁)).
pub fn closed_form_a3_rotation(
    mu: f64,
    orders: (f64, f64),
    xi: [f64; 2],
    grid: &TimeGrid,
) -> Result<SolutionTrajectory, SolveError> {
    check_orders(orders)?;
    let (a1, a2) = orders;
    let beta = a1 + a2;
    if beta > 1.0 {
        return Err(SolveError::Unsupported(format!(
            "rotation system with order sum {beta} > 1 has no closed form here"
        )));
    }
    let lead = ml(beta, 1.0)?;
    let kernel = ml(beta, beta)?;
    let lam = -mu * mu;
    let g1 = gamma_fn(1.0 - a1)?;
    let g2 = gamma_fn(1.0 - a2)?;
    let mut states = Vec::with_capacity(grid.len());
    for t in grid.nodes() {
        let e = lead.eval(lam * t.powf(beta))?;
        let mut phi = [e * xi[0], e * xi[1]];
        if mu != 0.0 && t > 0.0 {
            let g = |s: f64| kernel.eval(lam * (t - s).powf(beta)).unwrap_or(f64::NAN);
            if xi[1] != 0.0 {
                phi[0] += mu * xi[1] / g2 * weakly_singular_integral_checked(t, a2, beta, &g, QUAD_TOL)?;
            }
            if xi[0] != 0.0 {
                phi[1] -= mu * xi[0] / g1 * weakly_singular_integral_checked(t, a1, beta, &g, QUAD_TOL)?;
            }
        }
        states.push(phi.to_vec());
    }
    Ok(assemble(grid, orders, xi, states, [[0.0, mu], [-mu, 0.0]], "closed-form-a3"))
}
