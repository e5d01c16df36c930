use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{GalerkinError, GalerkinModel};
use crate::export::{write_numeric_csv, ExportError};
use crate::fode::SolutionTrajectory;
use crate::fraccalc::{gamma_fn, rl_integral_values, FracOrder};

/// Per-node energy quantities of a Galerkin run and the data constants of
/// the two a priori estimates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub alpha: f64,
    pub times: Vec<f64>,
    /// J^{1-α}|u'|² (plain |u'|² at α = 1)
    pub j1ma_uprime_sq: Vec<f64>,
    pub uprime_sq: Vec<f64>,
    /// ((u, u)) = aᵀ A1 a
    pub grad_u_sq: Vec<f64>,
    /// vᵀ A3 v
    pub f_deltaprime_sq: Vec<f64>,
    /// bᵀ A6 b
    pub h_delta_sq: Vec<f64>,
    /// |ᶜDᵅu'|² = |-A1 a + A2 v|²
    pub cd_uprime_sq: Vec<f64>,
    /// ((u', u')) = yᵀ A1 y
    pub grad_uprime_sq: Vec<f64>,
    /// |δ''|² from the boundary equation
    pub deltadoubleprime_sq: Vec<f64>,
    /// |δ'|²
    pub deltaprime_sq: Vec<f64>,
    /// Estimate 1 data side
    pub rhs1: f64,
    /// Estimate 2 data constant
    pub rhs2: f64,
    pub est1_margin: Vec<f64>,
}

fn quad(m: &DMatrix<f64>, x: &[f64]) -> f64 {
    let v = DVector::from_column_slice(x);
    v.dot(&(m * &v))
}

fn sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// T^{1-α}/Γ(2-α)
fn memory_factor(alpha: f64, horizon: f64) -> f64 {
    horizon.powf(1.0 - alpha) / gamma_fn(2.0 - alpha).expect("2 - α lies in [1, 2)")
}

/// Data side of Estimate 1:
/// T^{1-α}/Γ(2-α)|u1m|² + ((u0m, u0m)) + f1|δ1m|² + h1|δ0m|².
pub fn estimate_1_rhs(model: &GalerkinModel, alpha: f64, horizon: f64) -> f64 {
    let c = &model.coeffs;
    memory_factor(alpha, horizon) * model.u1m.norm_squared()
        + quad(&model.a1, model.u0m.as_slice())
        + c.f1() * model.delta1m.norm_squared()
        + c.h1() * model.delta0m.norm_squared()
}

/// Bound on |δ''(0)|² from the boundary equation at t = 0:
/// (2 g1²|δ1m|² + 4 c0² ((u1m, u1m)) + 4 h1²|δ0m|²) / f0².
pub fn initial_boundary_acceleration_bound(model: &GalerkinModel) -> f64 {
    let c = &model.coeffs;
    let c0 = model.trace_constant_sq();
    (2.0 * c.g1().powi(2) * model.delta1m.norm_squared()
        + 4.0 * c0 * quad(&model.a1, model.u1m.as_slice())
        + 4.0 * c.h1().powi(2) * model.delta0m.norm_squared())
        / c.f0().powi(2)
}

/// 1 / (T^α Γ(1-α)), the lower bound of the J^{1-α} kernel on [0, T].
fn kernel_floor(alpha: f64, horizon: f64) -> f64 {
    1.0 / (horizon.powf(alpha) * gamma_fn(1.0 - alpha).expect("α < 1"))
}

fn initial_caputo_sq(model: &GalerkinModel) -> f64 {
    (-(&model.a1 * &model.u0m) + &model.a2 * &model.delta1m).norm_squared()
}

/// Data constant of Estimate 2. For α < 1 the Young parameter is
/// ε = f0/(2 T^α Γ(1-α)) and J¹|δ'|² is bounded through Estimate 1; at α = 1
/// it is the initial energy of the time-differentiated system.
pub fn estimate_2_rhs(model: &GalerkinModel, alpha: f64, horizon: f64) -> f64 {
    let c = &model.coeffs;
    let accel = initial_boundary_acceleration_bound(model);
    let y0 = initial_caputo_sq(model);
    let u1 = quad(&model.a1, model.u1m.as_slice());
    if alpha == 1.0 {
        return y0 + u1 + c.f1() * accel + c.h1() * model.delta1m.norm_squared();
    }
    let mf = memory_factor(alpha, horizon);
    let eps = 0.5 * c.f0() * kernel_floor(alpha, horizon);
    let boundary_velocity = horizon * estimate_1_rhs(model, alpha, horizon) / c.f0();
    c.h1().powi(2) / eps * mf * mf * boundary_velocity + y0 + mf * (u1 + c.f1() * accel)
}

fn cumulative_trapezoid(f: &[f64], h: f64) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    for k in 1..f.len() {
        out[k] = out[k - 1] + 0.5 * h * (f[k - 1] + f[k]);
    }
    out
}

impl EnergyReport {
    pub fn evaluate(model: &GalerkinModel, alpha: FracOrder, traj: &SolutionTrajectory) -> Result<Self, GalerkinError> {
        let m = model.m();
        if traj.dim() != 4 * m {
            return Err(GalerkinError::InvalidInput(format!("trajectory of dimension {} for m = {m}", traj.dim())));
        }
        let grid = &traj.grid;
        let len = grid.len();
        let mut r = Self {
            alpha: alpha.value(),
            times: grid.nodes(),
            j1ma_uprime_sq: Vec::new(),
            uprime_sq: Vec::with_capacity(len),
            grad_u_sq: Vec::with_capacity(len),
            f_deltaprime_sq: Vec::with_capacity(len),
            h_delta_sq: Vec::with_capacity(len),
            cd_uprime_sq: Vec::with_capacity(len),
            grad_uprime_sq: Vec::with_capacity(len),
            deltadoubleprime_sq: Vec::with_capacity(len),
            deltaprime_sq: Vec::with_capacity(len),
            rhs1: estimate_1_rhs(model, alpha.value(), grid.horizon()),
            rhs2: estimate_2_rhs(model, alpha.value(), grid.horizon()),
            est1_margin: Vec::new(),
        };
        for (s, d) in traj.states.iter().zip(&traj.caputo_values) {
            let (y, a, v, b) = (&s[..m], &s[m..2 * m], &s[2 * m..3 * m], &s[3 * m..]);
            r.uprime_sq.push(sq(y));
            r.grad_u_sq.push(quad(&model.a1, a));
            r.f_deltaprime_sq.push(quad(&model.a3, v));
            r.h_delta_sq.push(quad(&model.a6, b));
            r.cd_uprime_sq.push(sq(&d[..m]));
            r.grad_uprime_sq.push(quad(&model.a1, y));
            r.deltadoubleprime_sq.push(sq(&d[2 * m..3 * m]));
            r.deltaprime_sq.push(sq(v));
        }
        r.j1ma_uprime_sq = if alpha.is_one() {
            r.uprime_sq.clone()
        } else {
            rl_integral_values(&r.uprime_sq, grid.step(), FracOrder::new(1.0 - alpha.value())?)
        };
        r.est1_margin = energy_estimate_1(&r, model);
        Ok(r)
    }

    /// |u'|² + ((u, u)) + vᵀA3v + bᵀA6b, conserved at α = 1 when g = 0.
    pub fn classical_energy(&self) -> Vec<f64> {
        (0..self.times.len())
            .map(|k| self.uprime_sq[k] + self.grad_u_sq[k] + self.f_deltaprime_sq[k] + self.h_delta_sq[k])
            .collect()
    }

    /// Largest |E(t) - E(0)| / E(0) of the classical energy.
    pub fn relative_drift(&self) -> f64 {
        let e = self.classical_energy();
        let e0 = e[0];
        if e0 == 0.0 {
            return e.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()));
        }
        e.iter().fold(0.0, |acc: f64, v| acc.max((v - e0).abs() / e0))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ExportError> {
        let header = [
            "t",
            "J1ma_uprime_sq",
            "grad_u_sq",
            "f_deltaprime_sq",
            "h_delta_sq",
            "cd_uprime_sq",
            "est1_margin",
        ]
        .map(String::from);
        let rows: Vec<Vec<f64>> = (0..self.times.len())
            .map(|k| {
                vec![
                    self.times[k],
                    self.j1ma_uprime_sq[k],
                    self.grad_u_sq[k],
                    self.f_deltaprime_sq[k],
                    self.h_delta_sq[k],
                    self.cd_uprime_sq[k],
                    self.est1_margin[k],
                ]
            })
            .collect();
        write_numeric_csv(out, &header, &rows)
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<(), ExportError> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

/// RHS1 - [J^{1-α}|u'|² + ((u, u)) + f0|δ'|²] at every node.
pub fn energy_estimate_1(report: &EnergyReport, model: &GalerkinModel) -> Vec<f64> {
    let f0 = model.coeffs.f0();
    (0..report.times.len())
        .map(|k| report.rhs1 - (report.j1ma_uprime_sq[k] + report.grad_u_sq[k] + f0 * report.deltaprime_sq[k]))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate2Summary {
    /// |ᶜDᵅu'(0)|²
    pub initial_caputo_sq: f64,
    /// |Δu0m|² = |A1 u0m|²
    pub laplacian_sq: f64,
    /// | |ᶜDᵅu'(0)| - |A1 u0m| |
    pub initial_gap: f64,
    /// squared discrete trace constant (γ₀)
    pub c0_sq: f64,
    /// discrete trace constant (γ₁); zero on this basis
    pub c1: f64,
    /// |A1 u0m|² + ((u1m, u1m)) + |δ0m|²
    pub data_norm: f64,
    pub data_constant: f64,
    /// data_constant / data_norm
    pub k2: f64,
    pub sup_caputo_sq: f64,
    /// min over nodes of data_constant - left side
    pub min_margin: f64,
    pub margins: Vec<f64>,
}

/// Evaluates both parts of Estimate 2 on a run: the initial identity
/// |ᶜDᵅu'(0)| = |A1 u0m| (when δ1m = 0) and, at every node, the bound
/// |ᶜDᵅu'|² + c J¹((u', u')) + (c f0/2) J¹|δ''|² ≤ data constant with
/// c = 1/(T^α Γ(1-α)) (α < 1), or |ᶜDᵅu'|² + ((u', u')) + f0|δ''|² ≤ data
/// constant at α = 1.
pub fn energy_estimate_2(report: &EnergyReport, model: &GalerkinModel) -> Estimate2Summary {
    let alpha = report.alpha;
    let horizon = *report.times.last().expect("non-empty grid");
    let h = if report.times.len() > 1 { report.times[1] - report.times[0] } else { 0.0 };
    let f0 = model.coeffs.f0();
    let laplacian_sq = (&model.a1 * &model.u0m).norm_squared();
    let initial = report.cd_uprime_sq[0];
    let lhs: Vec<f64> = if alpha == 1.0 {
        (0..report.times.len())
            .map(|k| report.cd_uprime_sq[k] + report.grad_uprime_sq[k] + f0 * report.deltadoubleprime_sq[k])
            .collect()
    } else {
        let c = kernel_floor(alpha, horizon);
        let gu = cumulative_trapezoid(&report.grad_uprime_sq, h);
        let dd = cumulative_trapezoid(&report.deltadoubleprime_sq, h);
        (0..report.times.len())
            .map(|k| report.cd_uprime_sq[k] + c * gu[k] + 0.5 * c * f0 * dd[k])
            .collect()
    };
    let margins: Vec<f64> = lhs.iter().map(|l| report.rhs2 - l).collect();
    let data_norm = laplacian_sq + quad(&model.a1, model.u1m.as_slice()) + model.delta0m.norm_squared();
    Estimate2Summary {
        initial_caputo_sq: initial,
        laplacian_sq,
        initial_gap: (initial.sqrt() - laplacian_sq.sqrt()).abs(),
        c0_sq: model.trace_constant_sq(),
        c1: 0.0,
        data_norm,
        data_constant: report.rhs2,
        k2: if data_norm > 0.0 { report.rhs2 / data_norm } else { 0.0 },
        sup_caputo_sq: report.cd_uprime_sq.iter().fold(0.0, |a: f64, v| a.max(*v)),
        min_margin: margins.iter().fold(f64::INFINITY, |a: f64, v| a.min(*v)),
        margins,
    }
}
