use super::SolveError;
use crate::quadrature::gauss_legendre;

/// Result of an adaptive product-quadrature run.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureOutcome {
    pub value: f64,
    /// (panels per geometric cell, value) for each refinement level
    pub trace: Vec<(usize, f64)>,
}

const GL_POINTS: usize = 16;
const MAX_PANELS: usize = 64;

/// Integral of d^{p-1} against the two linear hats on [0, d1]
/// (weight of the value at 0, weight of the value at d1).
fn end_cell_moments(d1: f64, p: f64) -> (f64, f64) {
    let i0 = d1.powf(p) / p;
    let i1 = d1.powf(p + 1.0) / (p + 1.0);
    (i0 - i1 / d1, i1 / d1)
}

/// One half of the interval, parametrised by the distance d ∈ [0, half] from
/// its singular end, with weight d^{p-1} and smooth factor phi(d). Cells halve
/// toward d = 0 and each is split into `panels` Gauss-Legendre panels.
fn half_rule(half: f64, p: f64, phi: &dyn Fn(f64) -> f64, panels: usize, gl: &(Vec<f64>, Vec<f64>)) -> f64 {
    let levels = (45.0 / p.min(1.0)).ceil().min(1000.0) as usize;
    let mut total = 0.0;
    let mut hi = half;
    for _ in 0..levels {
        let lo = 0.5 * hi;
        let width = (hi - lo) / panels as f64;
        for k in 0..panels {
            let a = lo + k as f64 * width;
            for (x, w) in gl.0.iter().zip(&gl.1) {
                let d = a + 0.5 * (x + 1.0) * width;
                total += 0.5 * w * width * d.powf(p - 1.0) * phi(d);
            }
        }
        hi = lo;
    }
    let (w0, w1) = end_cell_moments(hi, p);
    total + w0 * phi(0.0) + w1 * phi(hi)
}

fn product_rule(t: f64, gamma: f64, beta: f64, g: &dyn Fn(f64) -> f64, panels: usize, gl: &(Vec<f64>, Vec<f64>)) -> f64 {
    let half = 0.5 * t;
    // Left half: weight s^{-γ}, smooth part (t - s)^{β-1} g(s), s = d.
    let left = half_rule(half, 1.0 - gamma, &|d| (t - d).powf(beta - 1.0) * g(d), panels, gl);
    // Right half: weight (t - s)^{β-1}, smooth part s^{-γ} g(s), s = t - d.
    let right = half_rule(half, beta, &|d| (t - d).powf(-gamma) * g(t - d), panels, gl);
    left + right
}

/// ∫_0^t s^{-γ} (t-s)^{β-1} g(s) ds for γ ∈ [0, 1), β ∈ (0, 1]. The interval
/// is split at t/2; each half uses cells shrinking geometrically toward its
/// singular end with Gauss-Legendre panels, and product quadrature exact on
/// the weight times a linear interpolant on the innermost cell. Panels are
/// doubled until successive values agree within `tol` (relative to
/// max(1, |value|)).
pub fn weakly_singular_integral(
    t: f64,
    gamma: f64,
    beta: f64,
    g: &dyn Fn(f64) -> f64,
    tol: f64,
) -> Result<QuadratureOutcome, SolveError> {
    if !(0.0..1.0).contains(&gamma) || !(beta > 0.0 && beta <= 1.0) {
        return Err(SolveError::InvalidProblem(format!("weight exponents gamma={gamma}, beta={beta}")));
    }
    if t == 0.0 {
        return Ok(QuadratureOutcome {
            value: 0.0,
            trace: Vec::new(),
        });
    }
    let gl = gauss_legendre(GL_POINTS);
    let mut cells = 1;
    let mut trace = vec![(cells, product_rule(t, gamma, beta, g, cells, &gl))];
    while cells < MAX_PANELS {
        cells *= 2;
        let v = product_rule(t, gamma, beta, g, cells, &gl);
        let prev = trace.last().expect("non-empty").1;
        trace.push((cells, v));
        if !v.is_finite() {
            break;
        }
        if (v - prev).abs() <= tol * v.abs().max(1.0) {
            return Ok(QuadratureOutcome { value: v, trace });
        }
    }
    Err(SolveError::Quadrature { t, trace })
}
