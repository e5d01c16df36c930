use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::Serialize;
use serde_json::json;

use super::basis::boundary_mode;
use super::{BoundaryCoefficients, EigenBasis, GalerkinError, InitialData};
use crate::export::{write_json_file, ExportError};
use crate::fode::{LinearBlockSystem, MultiOrderProblem};
use crate::fraccalc::FracOrder;
use crate::quadrature::gauss_legendre_on;

const GRAM_TOL: f64 = 1e-10;
const MAX_POINTS: usize = 512;
const SYMMETRY_TOL: f64 = 1e-12;
const EIGEN_TOL: f64 = 1e-8;

/// Whether the projected data equal the data themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataClass {
    /// Every term lies in W_m / Z_m.
    InSpan,
    /// Closed-form terms or modes beyond the truncation; projections only.
    General,
}

/// Galerkin matrices and projected data on the first m eigenfunctions.
#[derive(Debug, Clone)]
pub struct GalerkinModel {
    pub basis: EigenBasis,
    pub coeffs: BoundaryCoefficients,
    pub data: InitialData,
    /// ((w_j, w_i))
    pub a1: DMatrix<f64>,
    /// (z_j, γ₀ w_i) on the top edge
    pub a2: DMatrix<f64>,
    /// (f z_j, z_i)
    pub a3: DMatrix<f64>,
    /// (γ₀ w_j, z_i), the transpose of a2
    pub a4: DMatrix<f64>,
    /// (g z_j, z_i)
    pub a5: DMatrix<f64>,
    /// (h z_j, z_i)
    pub a6: DMatrix<f64>,
    pub u0m: DVector<f64>,
    pub u1m: DVector<f64>,
    pub delta0m: DVector<f64>,
    pub delta1m: DVector<f64>,
    pub quadrature_points: usize,
    pub gram_residual: f64,
    pub data_class: DataClass,
    a3_factor: Cholesky<f64, Dyn>,
}

/// sin/cos tables of one direction at the quadrature nodes.
struct Tables {
    weights: Vec<f64>,
    sin: Vec<Vec<f64>>,
    cos: Vec<Vec<f64>>,
}

impl Tables {
    fn new(nodes: &[f64], weights: &[f64], freqs: &[f64]) -> Self {
        Self {
            weights: weights.to_vec(),
            sin: freqs.iter().map(|f| nodes.iter().map(|x| (f * x).sin()).collect()).collect(),
            cos: freqs.iter().map(|f| nodes.iter().map(|x| (f * x).cos()).collect()).collect(),
        }
    }

    fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        self.weights.iter().zip(a.iter().zip(b)).map(|(w, (p, q))| w * p * q).sum()
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

fn check_symmetric(name: &str, m: &DMatrix<f64>) -> Result<(), GalerkinError> {
    let asym = max_abs(&(m - m.transpose()));
    if asym > SYMMETRY_TOL {
        return Err(GalerkinError::Invariant(format!("{name} asymmetry {asym:e}")));
    }
    Ok(())
}

impl GalerkinModel {
    /// Assembles the six matrices and the projected data. The Gauss-Legendre
    /// order starts at 2·(largest mode index) + 8 and doubles until both Gram
    /// matrices are within 1e-10 of the identity.
    pub fn build(m: usize, coeffs: BoundaryCoefficients, data: InitialData) -> Result<Self, GalerkinError> {
        if m == 0 {
            return Err(GalerkinError::InvalidInput("at least one mode is required".into()));
        }
        let basis = EigenBasis::new(m);
        let mut points = 2 * basis.max_index() + 8;
        loop {
            let model = Self::assemble(&basis, coeffs.clone(), data.clone(), points)?;
            if model.gram_residual <= GRAM_TOL {
                return Ok(model);
            }
            if points * 2 > MAX_POINTS {
                return Err(GalerkinError::Assembly {
                    points,
                    residual: model.gram_residual,
                    tolerance: GRAM_TOL,
                });
            }
            points *= 2;
        }
    }

    fn assemble(
        basis: &EigenBasis,
        mut coeffs: BoundaryCoefficients,
        data: InitialData,
        points: usize,
    ) -> Result<Self, GalerkinError> {
        let m = basis.len();
        let modes = basis.modes();
        let (nodes, weights) = gauss_legendre_on(points, 0.0, 1.0);
        coeffs.check_at(&nodes)?;

        let kmax = basis.max_index().max(m);
        let xf: Vec<f64> = (1..=kmax).map(|k| k as f64 * PI).collect();
        let yf: Vec<f64> = (1..=kmax).map(|l| (l as f64 - 0.5) * PI).collect();
        let tx = Tables::new(&nodes, &weights, &xf);
        let ty = Tables::new(&nodes, &weights, &yf);

        let mut gram = DMatrix::zeros(m, m);
        let mut a1 = DMatrix::zeros(m, m);
        for (i, p) in modes.iter().enumerate() {
            for (j, q) in modes.iter().enumerate() {
                let (ki, kj, li, lj) = (p.k - 1, q.k - 1, p.l - 1, q.l - 1);
                let sx = tx.dot(&tx.sin[ki], &tx.sin[kj]);
                let cx = tx.dot(&tx.cos[ki], &tx.cos[kj]);
                let sy = ty.dot(&ty.sin[li], &ty.sin[lj]);
                let cy = ty.dot(&ty.cos[li], &ty.cos[lj]);
                gram[(i, j)] = 4.0 * sx * sy;
                a1[(i, j)] = 4.0 * (xf[ki] * xf[kj] * cx * sy + yf[li] * yf[lj] * sx * cy);
            }
        }

        // boundary functions and traces at the edge nodes
        let z: Vec<Vec<f64>> = (1..=m).map(|k| nodes.iter().map(|&x| boundary_mode(k, x)).collect()).collect();
        let trace: Vec<Vec<f64>> = modes.iter().map(|md| nodes.iter().map(|&x| md.value(x, 1.0)).collect()).collect();
        let weighted = |c: &dyn Fn(f64) -> f64| {
            let cw: Vec<f64> = nodes.iter().zip(&weights).map(|(&x, w)| w * c(x)).collect();
            DMatrix::from_fn(m, m, |i, j| (0..points).map(|p| cw[p] * z[i][p] * z[j][p]).sum::<f64>())
        };
        let zgram = weighted(&|_| 1.0);
        let a2 = DMatrix::from_fn(m, m, |i, j| tx.dot(&z[j], &trace[i]));
        let a4 = a2.transpose();
        let a3 = weighted(&|x| coeffs.f.eval(x));
        let a5 = weighted(&|x| coeffs.g.eval(x));
        let a6 = weighted(&|x| coeffs.h.eval(x));

        let gram_residual =
            max_abs(&(gram - DMatrix::identity(m, m))).max(max_abs(&(zgram - DMatrix::identity(m, m))));

        // projections
        let mut data_class = DataClass::InSpan;
        let mut u0m = DVector::zeros(m);
        let mut u1m = DVector::zeros(m);
        for (field, target) in [(&data.u0, &mut u0m), (&data.u1, &mut u1m)] {
            for t in &field.modes {
                match basis.position(super::Mode::new(t.k, t.l)) {
                    Some(i) => target[i] += t.value,
                    None => data_class = DataClass::General,
                }
            }
            if field.has_closed_form() {
                data_class = DataClass::General;
                for (i, md) in modes.iter().enumerate() {
                    let mut s = 0.0;
                    for (p, (&x, wx)) in nodes.iter().zip(&weights).enumerate() {
                        for (q, (&y, wy)) in nodes.iter().zip(&weights).enumerate() {
                            let w = 2.0 * tx.sin[md.k - 1][p] * ty.sin[md.l - 1][q];
                            s += wx * wy * field.closed_form(x, y) * w;
                        }
                    }
                    target[i] += s;
                }
            }
        }
        let mut delta0m = DVector::zeros(m);
        for t in &data.delta0.modes {
            if t.k >= 1 && t.k <= m {
                delta0m[t.k - 1] += t.value;
            } else {
                data_class = DataClass::General;
            }
        }
        if data.delta0.parabola != 0.0 {
            data_class = DataClass::General;
            let shape: Vec<f64> = nodes.iter().map(|&x| data.delta0.closed_form(x)).collect();
            for k in 0..m {
                delta0m[k] += tx.dot(&shape, &z[k]);
            }
        }
        // ∂w/∂ν vanishes on the top edge for every basis function, so the
        // compatible value is exactly zero.
        let delta1m = match &data.delta1_override {
            None => DVector::zeros(m),
            Some(v) if v.len() == m => DVector::from_column_slice(v),
            Some(v) => {
                return Err(GalerkinError::InvalidInput(format!("delta1 override has {} entries for m = {m}", v.len())))
            }
        };

        check_symmetric("A3", &a3)?;
        check_symmetric("A5", &a5)?;
        check_symmetric("A6", &a6)?;
        let lambda = basis.eigenvalues();
        let eig_dev = max_abs(&(&a1 - DMatrix::from_diagonal(&DVector::from_vec(lambda.clone()))));
        if a1.diagonal().iter().any(|&d| !(d > 0.0)) || eig_dev > EIGEN_TOL * lambda.last().copied().unwrap_or(1.0) {
            return Err(GalerkinError::Invariant(format!("stiffness matrix deviates from diag(λ) by {eig_dev:e}")));
        }
        let a3_factor = Cholesky::new(a3.clone()).ok_or_else(|| GalerkinError::Invariant("A3 is not positive definite".into()))?;
        if Cholesky::new(a6.clone()).is_none() {
            return Err(GalerkinError::Invariant("A6 is not positive definite".into()));
        }
        let a5_min = a5.clone().symmetric_eigenvalues().min();
        if a5_min < -SYMMETRY_TOL * max_abs(&a5).max(1.0) {
            return Err(GalerkinError::Invariant(format!("A5 has eigenvalue {a5_min:e}")));
        }

        Ok(Self {
            basis: basis.clone(),
            coeffs,
            data,
            a1,
            a2,
            a3,
            a4,
            a5,
            a6,
            u0m,
            u1m,
            delta0m,
            delta1m,
            quadrature_points: points,
            gram_residual,
            data_class,
            a3_factor,
        })
    }

    pub fn m(&self) -> usize {
        self.basis.len()
    }

    pub fn delta1_overridden(&self) -> bool {
        self.data.delta1_override.is_some()
    }

    /// A3⁻¹ x through the cached factorisation.
    pub fn solve_a3(&self, x: &DVector<f64>) -> DVector<f64> {
        self.a3_factor.solve(x)
    }

    /// Block matrix of the first-order system in the state (y | a | v | b):
    /// y gets -A1 a + A2 v, a gets y, v gets -A3⁻¹(A4 y + A5 v + A6 b), b gets v.
    pub fn block_matrix(&self) -> DMatrix<f64> {
        let m = self.m();
        let mut k = DMatrix::zeros(4 * m, 4 * m);
        k.view_mut((0, m), (m, m)).copy_from(&(-&self.a1));
        k.view_mut((0, 2 * m), (m, m)).copy_from(&self.a2);
        k.view_mut((m, 0), (m, m)).fill_with_identity();
        k.view_mut((2 * m, 0), (m, m)).copy_from(&(-self.a3_factor.solve(&self.a4)));
        k.view_mut((2 * m, 2 * m), (m, m)).copy_from(&(-self.a3_factor.solve(&self.a5)));
        k.view_mut((2 * m, 3 * m), (m, m)).copy_from(&(-self.a3_factor.solve(&self.a6)));
        k.view_mut((3 * m, 2 * m), (m, m)).fill_with_identity();
        k
    }

    /// (u1m, u0m, δ1m, δ0m)
    pub fn initial_state(&self) -> Vec<f64> {
        self.u1m
            .iter()
            .chain(self.u0m.iter())
            .chain(self.delta1m.iter())
            .chain(self.delta0m.iter())
            .copied()
            .collect()
    }

    /// Orders α on the velocity block and 1 on the rest.
    pub fn linear_system(&self, alpha: FracOrder) -> Result<LinearBlockSystem, GalerkinError> {
        let m = self.m();
        let orders = (0..4 * m).map(|i| if i < m { alpha } else { FracOrder::ONE }).collect();
        Ok(LinearBlockSystem::new(self.block_matrix(), orders)?)
    }

    /// Largest Rayleigh quotient |γ₀u|² / ‖u‖²_{H¹} over W_m, the discrete
    /// stand-in for the squared trace constant c₀.
    pub fn trace_constant_sq(&self) -> f64 {
        let inv_sqrt = DMatrix::from_diagonal(&self.a1.diagonal().map(|d| 1.0 / d.sqrt()));
        let s = &inv_sqrt * &self.a2 * self.a2.transpose() * &inv_sqrt;
        let s = 0.5 * (&s + s.transpose());
        s.symmetric_eigenvalues().max()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows = |m: &DMatrix<f64>| -> Vec<f64> { m.transpose().iter().copied().collect() };
        let vec = |v: &DVector<f64>| -> Vec<f64> { v.iter().copied().collect() };
        json!({
            "m": self.m(),
            "modes": self.basis.modes(),
            "eigenvalues": self.basis.eigenvalues(),
            "quadrature_points": self.quadrature_points,
            "gram_residual": self.gram_residual,
            "data_class": self.data_class,
            "delta1_override": self.delta1_overridden(),
            "matrices": {
                "A1": rows(&self.a1),
                "A2": rows(&self.a2),
                "A3": rows(&self.a3),
                "A4": rows(&self.a4),
                "A5": rows(&self.a5),
                "A6": rows(&self.a6),
            },
            "projected": {
                "u0m": vec(&self.u0m),
                "u1m": vec(&self.u1m),
                "delta0m": vec(&self.delta0m),
                "delta1m": vec(&self.delta1m),
            },
            "coefficients": &self.coeffs,
        })
    }

    pub fn write_json(&self, path: &Path) -> Result<(), ExportError> {
        write_json_file(path, &self.to_json())
    }
}

/// The 4m-dimensional multi-order problem for the Galerkin system.
pub fn assemble_system(model: &GalerkinModel, alpha: FracOrder, horizon: f64) -> Result<MultiOrderProblem, GalerkinError> {
    Ok(model.linear_system(alpha)?.into_problem(model.initial_state(), horizon)?)
}
