use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::SolveError;
use crate::fraccalc::FracOrder;

/// Right-hand side f(t, x) written into `out`. Must be safe to call
/// concurrently.
pub type Rhs = Arc<dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync>;

/// Axis-aligned box the trajectory is expected to stay inside.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxDomain {
    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (lo, hi))| *lo < *v && *v < *hi)
    }
}

/// Cauchy problem ᶜD^{α_j} φ_j = f_j(φ, t), φ(0) = ξ on [0, T].
#[derive(Clone)]
pub struct MultiOrderProblem {
    orders: Vec<FracOrder>,
    xi: Vec<f64>,
    rhs: Rhs,
    lipschitz: f64,
    horizon: f64,
    domain: Option<BoxDomain>,
}

impl fmt::Debug for MultiOrderProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiOrderProblem")
            .field("orders", &self.orders)
            .field("xi", &self.xi)
            .field("lipschitz", &self.lipschitz)
            .field("horizon", &self.horizon)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl MultiOrderProblem {
    pub fn new(
        orders: Vec<FracOrder>,
        xi: Vec<f64>,
        rhs: Rhs,
        lipschitz: f64,
        horizon: f64,
    ) -> Result<Self, SolveError> {
        if orders.is_empty() || orders.len() != xi.len() {
            return Err(SolveError::InvalidProblem(format!(
                "{} orders for an initial state of length {}",
                orders.len(),
                xi.len()
            )));
        }
        if !(lipschitz >= 0.0) || !lipschitz.is_finite() {
            return Err(SolveError::InvalidProblem(format!("Lipschitz constant {lipschitz}")));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(SolveError::InvalidProblem(format!("horizon {horizon}")));
        }
        if xi.iter().any(|v| !v.is_finite()) {
            return Err(SolveError::InvalidProblem("non-finite initial state".into()));
        }
        Ok(Self {
            orders,
            xi,
            rhs,
            lipschitz,
            horizon,
            domain: None,
        })
    }

    pub fn with_domain(mut self, domain: BoxDomain) -> Result<Self, SolveError> {
        if domain.lower.len() != self.dim() || domain.upper.len() != self.dim() {
            return Err(SolveError::InvalidProblem("domain dimension mismatch".into()));
        }
        self.domain = Some(domain);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    pub fn orders(&self) -> &[FracOrder] {
        &self.orders
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn domain(&self) -> Option<&BoxDomain> {
        self.domain.as_ref()
    }

    pub fn rhs(&self) -> &Rhs {
        &self.rhs
    }

    /// Evaluates f(t, x), rejecting non-finite output.
    pub fn eval(&self, step: usize, t: f64, x: &[f64], out: &mut [f64]) -> Result<(), SolveError> {
        (self.rhs)(t, x, out);
        match out.iter().position(|v| !v.is_finite()) {
            Some(component) => Err(SolveError::Evaluation { step, component }),
            None => Ok(()),
        }
    }

    /// The same system with components reordered: new component i is old
    /// component perm[i].
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, SolveError> {
        let n = self.dim();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(SolveError::InvalidProblem("not a permutation".into()));
        }
        let perm = perm.to_vec();
        let inner = self.rhs.clone();
        let p2 = perm.clone();
        let rhs: Rhs = Arc::new(move |t, x, out| {
            let mut orig = vec![0.0; x.len()];
            for (i, &p) in p2.iter().enumerate() {
                orig[p] = x[i];
            }
            let mut res = vec![0.0; x.len()];
            inner(t, &orig, &mut res);
            for (i, &p) in p2.iter().enumerate() {
                out[i] = res[p];
            }
        });
        let domain = self.domain.as_ref().map(|d| BoxDomain {
            lower: perm.iter().map(|&p| d.lower[p]).collect(),
            upper: perm.iter().map(|&p| d.upper[p]).collect(),
        });
        Ok(Self {
            orders: perm.iter().map(|&p| self.orders[p]).collect(),
            xi: perm.iter().map(|&p| self.xi[p]).collect(),
            rhs,
            lipschitz: self.lipschitz,
            horizon: self.horizon,
            domain,
        })
    }
}

/// Linear system f(x, t) = A x with per-component orders.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearBlockSystem {
    matrix: DMatrix<f64>,
    orders: Vec<FracOrder>,
}

impl LinearBlockSystem {
    pub fn new(matrix: DMatrix<f64>, orders: Vec<FracOrder>) -> Result<Self, SolveError> {
        if !matrix.is_square() || matrix.nrows() != orders.len() {
            return Err(SolveError::InvalidProblem(format!(
                "{}x{} matrix with {} orders",
                matrix.nrows(),
                matrix.ncols(),
                orders.len()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(SolveError::InvalidProblem("non-finite matrix entry".into()));
        }
        Ok(Self { matrix, orders })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn orders(&self) -> &[FracOrder] {
        &self.orders
    }

    /// Spectral norm, the Lipschitz constant of x ↦ A x in the Euclidean norm.
    pub fn operator_norm(&self) -> f64 {
        self.matrix
            .clone()
            .singular_values()
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }

    /// Cholesky factorisation succeeds (for matrices flagged SPD by callers).
    pub fn is_positive_definite(&self) -> bool {
        self.matrix.clone().cholesky().is_some()
    }

    pub fn into_problem(self, xi: Vec<f64>, horizon: f64) -> Result<MultiOrderProblem, SolveError> {
        let lipschitz = self.operator_norm();
        let a = self.matrix.clone();
        let n = a.nrows();
        let rhs: Rhs = Arc::new(move |_t, x, out| {
            for (i, o) in out.iter_mut().enumerate().take(n) {
                let mut s = 0.0;
                for j in 0..n {
                    s += a[(i, j)] * x[j];
                }
                *o = s;
            }
        });
        MultiOrderProblem::new(self.orders, xi, rhs, lipschitz, horizon)
    }
}
