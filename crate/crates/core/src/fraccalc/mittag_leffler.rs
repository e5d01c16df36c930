use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{gamma_fn, ln_gamma, FracError};

/// Largest term magnitude tolerated in an alternating series before the
/// contour representation takes over.
const MAX_CANCELLING_TERM: f64 = 1e3;
const MAX_TERMS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLParams {
    pub alpha: f64,
    pub beta: f64,
    /// Target accuracy of the series tail and of the contour quadrature.
    pub tolerance: f64,
    /// Series is attempted only for |z| up to this radius.
    pub radius: f64,
}

impl MLParams {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self {
            alpha,
            beta,
            tolerance: 1e-15,
            radius: 5.0,
        }
    }

    pub fn validate(&self) -> Result<(), FracError> {
        let bad = |m: &str| Err(FracError::InvalidParams(m.to_string()));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive");
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad("beta must be positive");
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return bad("tolerance must lie in (0, 1)");
        }
        if !(self.radius > 0.0) {
            return bad("radius must be positive");
        }
        Ok(())
    }
}

/// Two-parameter Mittag-Leffler function with cached series coefficients.
#[derive(Debug, Clone)]
pub struct MittagLeffler {
    params: MLParams,
    /// 1/Γ(αk+β)
    coeffs: Vec<f64>,
    /// First index from which consecutive coefficient ratios are nonincreasing.
    monotone_from: usize,
}

impl MittagLeffler {
    pub fn new(params: MLParams) -> Result<Self, FracError> {
        params.validate()?;
        let MLParams { alpha, beta, .. } = params;
        let mut coeffs = Vec::new();
        for k in 0..MAX_TERMS {
            let x = alpha * k as f64 + beta;
            let c = if x < 170.0 {
                1.0 / gamma_fn(x)?
            } else {
                (-ln_gamma(x)?).exp()
            };
            if c == 0.0 && k > 0 {
                break;
            }
            coeffs.push(c);
        }
        let monotone_from = ((2.0 - beta) / alpha).ceil().max(0.0) as usize;
        Ok(Self {
            params,
            coeffs,
            monotone_from,
        })
    }

    pub fn params(&self) -> &MLParams {
        &self.params
    }

    /// E_{α,β}(z) for real z.
    pub fn eval(&self, z: f64) -> Result<f64, FracError> {
        let p = &self.params;
        if z == 0.0 {
            return Ok(self.coeffs[0]);
        }
        if p.alpha == 1.0 && p.beta == 1.0 {
            return finite(z, z.exp());
        }
        if z.abs() <= p.radius {
            if let Some(v) = self.series(Complex64::new(z, 0.0), z > 0.0) {
                return finite(z, v.re);
            }
        }
        let v = contour_inversion(z, p.alpha, p.beta, p.tolerance.ln())?;
        finite(z, v)
    }

    /// E_{α,β}(z) for complex z inside the series radius.
    pub fn eval_complex(&self, z: Complex64) -> Result<Complex64, FracError> {
        if z.im == 0.0 {
            return self.eval(z.re).map(|v| Complex64::new(v, 0.0));
        }
        if z.norm() > self.params.radius {
            return Err(FracError::Evaluation {
                z: z.norm(),
                reason: "complex arguments are supported only inside the series radius".into(),
            });
        }
        match self.series(z, false) {
            Some(v) if v.re.is_finite() && v.im.is_finite() => Ok(v),
            _ => Err(FracError::Evaluation {
                z: z.norm(),
                reason: "power series loses accuracy to cancellation at this argument".into(),
            }),
        }
    }

    /// Compensated power series; None when it cannot reach the tolerance.
    fn series(&self, z: Complex64, positive: bool) -> Option<Complex64> {
        let r = z.norm();
        let tol = self.params.tolerance;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut comp = Complex64::new(0.0, 0.0);
        let mut power = Complex64::new(1.0, 0.0);
        let mut max_term: f64 = 0.0;
        for k in 0..self.coeffs.len() {
            let term = power * self.coeffs[k];
            let mag = term.norm();
            max_term = max_term.max(mag);
            if !positive && max_term > MAX_CANCELLING_TERM {
                return None;
            }
            // Neumaier summation, componentwise.
            let t = sum + term;
            comp.re += if sum.re.abs() >= term.re.abs() {
                (sum.re - t.re) + term.re
            } else {
                (term.re - t.re) + sum.re
            };
            comp.im += if sum.im.abs() >= term.im.abs() {
                (sum.im - t.im) + term.im
            } else {
                (term.im - t.im) + sum.im
            };
            sum = t;
            if k + 1 < self.coeffs.len() && k >= self.monotone_from {
                let q = r * self.coeffs[k + 1] / self.coeffs[k];
                if q < 1.0 {
                    let tail = mag * q / (1.0 - q);
                    if tail <= tol * (sum + comp).norm().max(1.0) {
                        return Some(sum + comp);
                    }
                }
            }
            power *= z;
            if !power.re.is_finite() {
                return None;
            }
        }
        // Coefficients underflowed: the remaining tail is below f64 range.
        if self.coeffs.len() < MAX_TERMS {
            Some(sum + comp)
        } else {
            None
        }
    }
}

fn finite(z: f64, v: f64) -> Result<f64, FracError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(FracError::Evaluation {
            z,
            reason: "value not representable in double precision".into(),
        })
    }
}

/// One-shot evaluation of E_{α,β}(z) for real z.
pub fn mittag_leffler(z: f64, params: &MLParams) -> Result<f64, FracError> {
    MittagLeffler::new(*params)?.eval(z)
}

/// One-shot evaluation of E_{α,β}(z) for complex z with |z| ≤ radius.
pub fn mittag_leffler_complex(z: Complex64, params: &MLParams) -> Result<Complex64, FracError> {
    MittagLeffler::new(*params)?.eval_complex(z)
}

const LOG_EPS: f64 = -36.043653389117154;

/// Inverse Laplace transform of s^{α-β}/(s^α - z) at t = 1 along an optimal
/// parabolic contour, plus residues of the poles to its right.
fn contour_inversion(z: f64, alpha: f64, beta: f64, mut log_epsilon: f64) -> Result<f64, FracError> {
    let t = 1.0;
    let theta = if z < 0.0 { PI } else { 0.0 };
    let kmin = (-alpha / 2.0 - theta / (2.0 * PI)).ceil() as i64;
    let kmax = (alpha / 2.0 - theta / (2.0 * PI)).floor() as i64;
    let modulus = z.abs().powf(1.0 / alpha);
    let mut poles: Vec<(f64, Complex64)> = (kmin..=kmax)
        .map(|k| {
            let s = Complex64::from_polar(modulus, (theta + 2.0 * PI * k as f64) / alpha);
            ((s.re + s.norm()) / 2.0, s)
        })
        .filter(|(phi, _)| *phi > 1e-15)
        .collect();
    poles.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut phi = vec![0.0];
    let mut s_star = vec![Complex64::new(0.0, 0.0)];
    for (ph, s) in &poles {
        phi.push(*ph);
        s_star.push(*s);
    }
    let regions = phi.len();
    let mut p = vec![1.0; regions];
    p[0] = (-2.0 * (alpha - beta + 1.0)).max(0.0);
    let mut q = vec![1.0; regions];
    q[regions - 1] = f64::INFINITY;
    phi.push(f64::INFINITY);

    let mut attempts = 0;
    let (n_nodes, mu, h, region) = loop {
        let admissible: Vec<usize> = (0..regions)
            .filter(|&j| phi[j] < (log_epsilon - LOG_EPS) / t && phi[j] < phi[j + 1])
            .collect();
        let mut best: Option<(f64, f64, f64, usize)> = None;
        for &j in &admissible {
            let (mu, h, n) = if j + 1 < regions {
                optimal_param_bounded(t, phi[j], phi[j + 1], p[j], q[j], log_epsilon)
            } else {
                optimal_param_unbounded(t, phi[j], p[j], log_epsilon)
            };
            if best.is_none_or(|b| n < b.0) {
                best = Some((n, mu, h, j));
            }
        }
        match best {
            Some(b) if b.0 <= 200.0 => break b,
            _ => {
                log_epsilon += 10f64.ln();
                attempts += 1;
                if attempts > 14 || log_epsilon >= 0.0 {
                    return Err(FracError::Evaluation {
                        z,
                        reason: "no admissible contour parameters".into(),
                    });
                }
            }
        }
    };
    if !(mu > 0.0 && h > 0.0) {
        return Err(FracError::Evaluation {
            z,
            reason: "degenerate contour parameters".into(),
        });
    }

    let n = n_nodes as i64;
    let lambda = Complex64::new(z, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut integral = Complex64::new(0.0, 0.0);
    for k in -n..=n {
        let u = h * k as f64;
        let s = mu * (i * u + 1.0).powi(2);
        let ds = Complex64::new(-2.0 * mu * u, 2.0 * mu);
        let f = s.powf(alpha - beta) / (s.powf(alpha) - lambda) * ds;
        integral += (s * t).exp() * f;
    }
    integral = integral * h / (2.0 * PI * i);
    let residues: Complex64 = s_star[region + 1..]
        .iter()
        .map(|s| s.powf(1.0 - beta) * (s * t).exp() / alpha)
        .sum();
    Ok((integral + residues).re)
}

fn optimal_param_bounded(
    t: f64,
    phi_j: f64,
    phi_j1: f64,
    pj: f64,
    qj: f64,
    log_epsilon: f64,
) -> (f64, f64, f64) {
    let fac = 1.01;
    let f_max = (log_epsilon - LOG_EPS).exp();
    let sq_j = phi_j.sqrt();
    let threshold = 2.0 * ((log_epsilon - LOG_EPS) / t).sqrt();
    let sq_j1 = phi_j1.sqrt().min(threshold - sq_j);
    let small = 1e-14;

    let mut f_bar = 1.0;
    let (bar_j, bar_j1) = if pj < small && qj < small {
        (sq_j, sq_j1)
    } else if pj < small {
        let f_min = if sq_j > 0.0 {
            fac * (sq_j / (sq_j1 - sq_j)).powf(qj)
        } else {
            fac
        };
        if f_min >= f_max {
            return (0.0, 0.0, f64::INFINITY);
        }
        f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fq = f_bar.powf(-1.0 / qj);
        (sq_j, (2.0 * sq_j1 - fq * sq_j) / (2.0 + fq))
    } else if qj < small {
        let f_min = fac * (sq_j1 / (sq_j1 - sq_j)).powf(pj);
        if f_min >= f_max {
            return (0.0, 0.0, f64::INFINITY);
        }
        f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fp = f_bar.powf(-1.0 / pj);
        ((2.0 * sq_j + fp * sq_j1) / (2.0 - fp), sq_j1)
    } else {
        let mut f_min = fac * (sq_j + sq_j1) / (sq_j1 - sq_j).powf(pj.max(qj));
        if f_min >= f_max {
            return (0.0, 0.0, f64::INFINITY);
        }
        f_min = f_min.max(1.5);
        f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fp = f_bar.powf(-1.0 / pj);
        let fq = f_bar.powf(-1.0 / qj);
        let w = -phi_j1 * t / log_epsilon;
        let den = 2.0 + w - (1.0 + w) * fp + fq;
        (
            ((2.0 + w + fq) * sq_j + fp * sq_j1) / den,
            (-(1.0 + w) * fq * sq_j + (2.0 + w - (1.0 + w) * fp) * sq_j1) / den,
        )
    };
    let log_eps_adj = log_epsilon - f_bar.ln();
    let w = -bar_j1 * bar_j1 * t / log_eps_adj;
    let mu = (((1.0 + w) * bar_j + bar_j1) / (2.0 + w)).powi(2);
    let h = -2.0 * PI / log_eps_adj * (bar_j1 - bar_j) / ((1.0 + w) * bar_j + bar_j1);
    let n = ((1.0 - log_eps_adj / t / mu).sqrt() / h).ceil();
    if n.is_finite() && h > 0.0 {
        (mu, h, n)
    } else {
        (0.0, 0.0, f64::INFINITY)
    }
}

fn optimal_param_unbounded(t: f64, phi_j: f64, pj: f64, log_epsilon: f64) -> (f64, f64, f64) {
    let sq_phi = phi_j.sqrt();
    let mut phibar = if phi_j > 0.0 { phi_j * 1.01 } else { 0.01 };
    let mut sq_phibar = phibar.sqrt();
    let (f_min, f_max, f_tar) = (1.0, 10.0, 5.0f64);
    let mut n;
    let mut a;
    let mut sq_mu;
    let mut iterations = 0;
    loop {
        let phi_t = phibar * t;
        let log_eps_phi_t = log_epsilon / phi_t;
        n = (phi_t / PI * (1.0 - 3.0 * log_eps_phi_t / 2.0 + (1.0 - 2.0 * log_eps_phi_t).sqrt())).ceil();
        a = PI * n / phi_t;
        sq_mu = sq_phibar * (4.0 - a).abs() / (7.0 - (1.0 + 12.0 * a).sqrt()).abs();
        let fbar = ((sq_phibar - sq_phi) / sq_mu).powf(-pj);
        iterations += 1;
        if pj < 1e-14 || (f_min < fbar && fbar < f_max) || iterations > 100 {
            break;
        }
        sq_phibar = f_tar.powf(-1.0 / pj) * sq_mu + sq_phi;
        phibar = sq_phibar * sq_phibar;
    }
    let mut mu = sq_mu * sq_mu;
    let mut h = (-3.0 * a - 2.0 + 2.0 * (1.0 + 12.0 * a).sqrt()) / (4.0 - a) / n;
    let threshold = (log_epsilon - LOG_EPS) / t;
    if mu > threshold {
        let qv = if pj.abs() < 1e-14 {
            0.0
        } else {
            f_tar.powf(-1.0 / pj) * mu.sqrt()
        };
        let phibar2 = (qv + phi_j.sqrt()).powi(2);
        if phibar2 < threshold {
            let w = (LOG_EPS / (LOG_EPS - log_epsilon)).sqrt();
            let u = (-phibar2 * t / LOG_EPS).sqrt();
            mu = threshold;
            n = (w * log_epsilon / 2.0 / PI / (u * w - 1.0)).ceil();
            h = (LOG_EPS / (LOG_EPS - log_epsilon)).sqrt() / n;
        } else {
            return (0.0, 0.0, f64::INFINITY);
        }
    }
    (mu, h, n)
}
