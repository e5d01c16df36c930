use serde::{Deserialize, Serialize};

use super::{caputo_values, gamma_fn, rl_integral_values, FracError, FracOrder, SampledFunction};

/// Measured residuals and margins of the Caputo / Riemann-Liouville identities
/// on one sampled function. Residuals are sup-norms over nodes, margins are
/// minima (negative means violated).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub alpha: f64,
    pub steps: usize,
    /// T^{1-α} Γ(α) J^α f - J¹ f; absent when f takes negative values.
    pub integral_comparison_margin: Option<f64>,
    /// J^α[ᶜD^α f] - (f - f(0))
    pub inversion_residual: f64,
    /// J¹[ᶜD^α f] - (J^{1-α} f - f(0) t^{1-α}/Γ(2-α))
    pub flux_residual: f64,
    /// ᶜD^α f - J^{1-α} f'
    pub derivative_residual: f64,
    /// (T^{1-α}/Γ(2-α)) J^{1-α}|f'|² - |ᶜD^α f|²
    pub square_bound_margin: f64,
    /// J^α J^{1-α} f - J¹ f
    pub semigroup_residual: f64,
}

impl IdentityReport {
    pub fn max_equality_residual(&self) -> f64 {
        self.inversion_residual
            .max(self.flux_residual)
            .max(self.derivative_residual)
    }
}

fn sup_diff(a: &[f64], b: &[f64], from: usize) -> f64 {
    a.iter()
        .zip(b)
        .skip(from)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Second-order finite-difference derivative of equispaced samples.
pub(crate) fn finite_difference(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    if n < 3 {
        let d = (f[n - 1] - f[0]) / (h * (n - 1) as f64);
        return vec![d; n];
    }
    let mut out = vec![0.0; n];
    out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for k in 1..n - 1 {
        out[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
    }
    out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    out
}

/// Identity suite with f' estimated by second-order finite differences.
pub fn check_identity_suite(f: &SampledFunction, alpha: FracOrder) -> Result<IdentityReport, FracError> {
    let df = finite_difference(f.values(), f.grid().step());
    identity_suite_impl(f, &df, alpha)
}

/// Identity suite with a caller-supplied derivative.
pub fn check_identity_suite_with_derivative(
    f: &SampledFunction,
    derivative: &SampledFunction,
    alpha: FracOrder,
) -> Result<IdentityReport, FracError> {
    if derivative.grid() != f.grid() {
        return Err(FracError::LengthMismatch {
            expected: f.grid().len(),
            got: derivative.values().len(),
        });
    }
    identity_suite_impl(f, derivative.values(), alpha)
}

fn identity_suite_impl(f: &SampledFunction, df: &[f64], alpha: FracOrder) -> Result<IdentityReport, FracError> {
    let grid = f.grid();
    let h = grid.step();
    let t_end = grid.horizon();
    let a = alpha.value();
    let v = f.values();
    let f0 = v[0];
    let nodes = grid.nodes();

    let j_alpha = rl_integral_values(v, h, alpha);
    let j_one = rl_integral_values(v, h, FracOrder::ONE);

    let integral_comparison_margin = if v.iter().all(|&x| x >= 0.0) {
        let c = t_end.powf(1.0 - a) * gamma_fn(a)?;
        Some(
            j_alpha
                .iter()
                .zip(&j_one)
                .map(|(ja, j1)| c * ja - j1)
                .fold(f64::INFINITY, f64::min),
        )
    } else {
        None
    };

    let mut cd = caputo_values(v, h, alpha)?;
    // The Caputo derivative of a C¹ function vanishes at t = 0.
    cd[0] = 0.0;

    let inversion: Vec<f64> = v.iter().map(|x| x - f0).collect();
    let inversion_residual = sup_diff(&rl_integral_values(&cd, h, alpha), &inversion, 0);

    let (flux_residual, derivative_residual, square_bound_margin, semigroup_residual) = if alpha.is_one() {
        let flux = sup_diff(&rl_integral_values(&cd, h, FracOrder::ONE), &inversion, 0);
        let deriv = sup_diff(&cd, df, 1);
        let margin = cd
            .iter()
            .zip(df)
            .skip(1)
            .map(|(c, d)| d * d - c * c)
            .fold(f64::INFINITY, f64::min);
        (flux, deriv, margin, 0.0)
    } else {
        let co = FracOrder::new(1.0 - a)?;
        let g2 = gamma_fn(2.0 - a)?;
        let j_co = rl_integral_values(v, h, co);
        let flux_target: Vec<f64> = j_co
            .iter()
            .zip(&nodes)
            .map(|(j, t)| j - f0 * t.powf(1.0 - a) / g2)
            .collect();
        let flux = sup_diff(&rl_integral_values(&cd, h, FracOrder::ONE), &flux_target, 0);

        let j_co_df = rl_integral_values(df, h, co);
        let deriv = sup_diff(&cd, &j_co_df, 1);

        let df_sq: Vec<f64> = df.iter().map(|d| d * d).collect();
        let bound = rl_integral_values(&df_sq, h, co);
        let c = t_end.powf(1.0 - a) / g2;
        let margin = cd
            .iter()
            .zip(&bound)
            .skip(1)
            .map(|(x, b)| c * b - x * x)
            .fold(f64::INFINITY, f64::min);

        let semi = sup_diff(&rl_integral_values(&j_co, h, alpha), &j_one, 0);
        (flux, deriv, margin, semi)
    };

    Ok(IdentityReport {
        alpha: a,
        steps: grid.steps(),
        integral_comparison_margin,
        inversion_residual,
        flux_residual,
        derivative_residual,
        square_bound_margin,
        semigroup_residual,
    })
}

/// Per-node margin 2 f ᶜD^α f - ᶜD^α[f²]; node 0 is NaN.
pub fn caputo_square_inequality(f: &SampledFunction, alpha: FracOrder) -> Result<SampledFunction, FracError> {
    let h = f.grid().step();
    let v = f.values();
    let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    let cd = caputo_values(v, h, alpha)?;
    let cd_sq = caputo_values(&sq, h, alpha)?;
    let margins = v
        .iter()
        .zip(cd.iter().zip(&cd_sq))
        .map(|(x, (c, cs))| 2.0 * x * c - cs)
        .collect();
    SampledFunction::new(*f.grid(), margins)
}
