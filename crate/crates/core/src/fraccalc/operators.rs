use super::{gamma_fn, FracError, FracOrder, SampledFunction};

/// (i+1)^p - i^p without cancellation for large i.
fn power_step(i: usize, p: f64) -> f64 {
    if i == 0 {
        return 1.0;
    }
    let x = i as f64;
    x.powf(p) * (p * (1.0 / x).ln_1p()).exp_m1()
}

/// Product-trapezoid weights for the Riemann-Liouville integral of one order
/// on grids with up to `steps` steps.
#[derive(Debug, Clone)]
pub struct RlWeights {
    order: f64,
    /// Interior weights indexed by lag; lag 0 multiplies the newest sample.
    lag: Vec<f64>,
    /// Weight of the initial sample at node n.
    start: Vec<f64>,
    /// Rectangle-rule weights used by the explicit predictor.
    rect: Vec<f64>,
    /// h^α / Γ(α+2)
    scale: f64,
    /// h^α / Γ(α+1)
    rect_scale: f64,
    h: f64,
}

impl RlWeights {
    pub fn new(order: FracOrder, h: f64, steps: usize) -> Self {
        let a = order.value();
        let p = a + 1.0;
        // d[i] = (i+1)^p - i^p, lag[i] = d[i] - d[i-1]
        let d: Vec<f64> = (0..=steps).map(|i| power_step(i, p)).collect();
        let mut lag = vec![1.0; steps + 1];
        for i in 1..=steps {
            lag[i] = d[i] - d[i - 1];
        }
        let mut start = vec![0.0; steps + 1];
        for (n, w) in start.iter_mut().enumerate().skip(1) {
            let nf = n as f64;
            *w = (nf - 1.0).powf(p) - (nf - 1.0 - a) * nf.powf(a);
        }
        let rect = (0..=steps).map(|i| power_step(i, a)).collect();
        let g2 = gamma_fn(a + 2.0).expect("order in (0,1]");
        let g1 = gamma_fn(a + 1.0).expect("order in (0,1]");
        Self {
            order: a,
            lag,
            start,
            rect,
            scale: h.powf(a) / g2,
            rect_scale: h.powf(a) / g1,
            h,
        }
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    /// Product-trapezoid J^α at node n from samples f[0..=n].
    pub fn at(&self, f: &[f64], n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let mut s = self.start[n] * f[0] + f[n];
        for j in 1..n {
            s += self.lag[n - j] * f[j];
        }
        self.scale * s
    }

    /// J^α at every node; order 1 uses the running trapezoid sum.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        if self.order == 1.0 {
            let h = self.h;
            let mut out = vec![0.0; f.len()];
            for n in 1..f.len() {
                out[n] = out[n - 1] + 0.5 * h * (f[n - 1] + f[n]);
            }
            return out;
        }
        (0..f.len()).map(|n| self.at(f, n)).collect()
    }

    /// Weight multiplying the newest sample, h^α / Γ(α+2).
    pub(crate) fn newest_weight(&self) -> f64 {
        self.scale
    }

    /// Trapezoid value at node n with the newest sample supplied separately.
    pub(crate) fn corrector(&self, history: &[f64], n: usize, newest: f64) -> f64 {
        let mut s = self.start[n] * history[0] + newest;
        for j in 1..n {
            s += self.lag[n - j] * history[j];
        }
        self.scale * s
    }

    /// Fractional rectangle rule at node n from samples f[0..n].
    pub(crate) fn predictor(&self, history: &[f64], n: usize) -> f64 {
        let mut s = 0.0;
        for j in 0..n {
            s += self.rect[n - 1 - j] * history[j];
        }
        self.rect_scale * s
    }
}

/// Product-trapezoid J^α of raw samples with step h.
pub fn rl_integral_values(f: &[f64], h: f64, order: FracOrder) -> Vec<f64> {
    if order.is_one() {
        let mut out = vec![0.0; f.len()];
        for n in 1..f.len() {
            out[n] = out[n - 1] + 0.5 * h * (f[n - 1] + f[n]);
        }
        return out;
    }
    RlWeights::new(order, h, f.len().saturating_sub(1)).apply(f)
}

/// Riemann-Liouville integral of order α, exact on the piecewise-linear
/// interpolant of the samples. Node 0 holds 0.
pub fn rl_integral(f: &SampledFunction, order: FracOrder) -> SampledFunction {
    let values = rl_integral_values(f.values(), f.grid().step(), order);
    SampledFunction::new(*f.grid(), values).expect("same grid")
}

/// L1 discretisation of the Caputo derivative of raw samples. Node 0 is NaN.
/// Order 1 falls back to second-order finite differences.
pub fn caputo_values(f: &[f64], h: f64, order: FracOrder) -> Result<Vec<f64>, FracError> {
    if f.len() < 2 {
        return Err(FracError::InvalidGrid {
            horizon: h * f.len().saturating_sub(1) as f64,
            steps: f.len().saturating_sub(1),
        });
    }
    let steps = f.len() - 1;
    let mut out = vec![f64::NAN; f.len()];
    if order.is_one() {
        if steps == 1 {
            out[1] = (f[1] - f[0]) / h;
            return Ok(out);
        }
        for k in 1..steps {
            out[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
        }
        out[steps] = (3.0 * f[steps] - 4.0 * f[steps - 1] + f[steps - 2]) / (2.0 * h);
        return Ok(out);
    }
    let a = order.value();
    let b: Vec<f64> = (0..steps).map(|j| power_step(j, 1.0 - a)).collect();
    let diffs: Vec<f64> = f.windows(2).map(|w| w[1] - w[0]).collect();
    let scale = 1.0 / (h.powf(a) * gamma_fn(2.0 - a)?);
    for k in 1..=steps {
        let mut s = 0.0;
        for j in 0..k {
            s += b[j] * diffs[k - 1 - j];
        }
        out[k] = scale * s;
    }
    Ok(out)
}

/// Caputo derivative of order α via the L1 scheme; node 0 is flagged NaN.
pub fn caputo_derivative(f: &SampledFunction, order: FracOrder) -> Result<SampledFunction, FracError> {
    let values = caputo_values(f.values(), f.grid().step(), order)?;
    SampledFunction::new(*f.grid(), values)
}
