use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

/// Index pair of one eigenfunction w_{k,l}(x, y) = 2 sin(kπx) sin((l-½)πy).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Mode {
    pub k: usize,
    pub l: usize,
}

impl Mode {
    pub fn new(k: usize, l: usize) -> Self {
        Self { k, l }
    }

    /// 4(k² + (l-½)²), an exact integer ordering key for the eigenvalue.
    fn key(self) -> usize {
        4 * self.k * self.k + (2 * self.l - 1) * (2 * self.l - 1)
    }

    /// π² (k² + (l-½)²)
    pub fn eigenvalue(self) -> f64 {
        PI * PI * self.key() as f64 / 4.0
    }

    fn y_freq(self) -> f64 {
        (self.l as f64 - 0.5) * PI
    }

    pub fn value(self, x: f64, y: f64) -> f64 {
        2.0 * (self.k as f64 * PI * x).sin() * (self.y_freq() * y).sin()
    }

    pub fn gradient(self, x: f64, y: f64) -> [f64; 2] {
        let (kx, ly) = (self.k as f64 * PI, self.y_freq());
        [
            2.0 * kx * (kx * x).cos() * (ly * y).sin(),
            2.0 * ly * (kx * x).sin() * (ly * y).cos(),
        ]
    }

    /// Coefficient c with γ₀(w)|_{Γ₁} = c z_k, namely √2 (-1)^{l-1}.
    pub fn trace_factor(self) -> f64 {
        if self.l % 2 == 1 {
            SQRT_2
        } else {
            -SQRT_2
        }
    }
}

/// z_k(x) = √2 sin(kπx) on the top edge.
pub fn boundary_mode(k: usize, x: f64) -> f64 {
    SQRT_2 * (k as f64 * PI * x).sin()
}

/// First m eigenfunctions of -Δ on the unit square with Dirichlet data on
/// the left, right and bottom sides and zero normal derivative on the top,
/// ordered by eigenvalue (ties by k, then l), together with the boundary
/// functions z_1..z_m.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenBasis {
    modes: Vec<Mode>,
}

impl EigenBasis {
    pub fn new(m: usize) -> Self {
        let mut modes = Vec::new();
        // every mode with k, l ≤ m is a candidate; the m smallest have k, l ≤ m
        for k in 1..=m {
            for l in 1..=m {
                modes.push(Mode::new(k, l));
            }
        }
        modes.sort_by_key(|md| (md.key(), md.k, md.l));
        modes.truncate(m);
        Self { modes }
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.eigenvalue()).collect()
    }

    pub fn position(&self, mode: Mode) -> Option<usize> {
        self.modes.iter().position(|&m| m == mode)
    }

    /// Largest index appearing in either direction (sets the quadrature order).
    pub fn max_index(&self) -> usize {
        self.modes.iter().map(|m| m.k.max(m.l)).max().unwrap_or(1)
    }

    /// u(x, y) = Σ c_i w_i(x, y)
    pub fn synthesize(&self, coeffs: &[f64], x: f64, y: f64) -> f64 {
        self.modes.iter().zip(coeffs).map(|(m, c)| c * m.value(x, y)).sum()
    }

    /// δ(x) = Σ c_k z_k(x)
    pub fn synthesize_boundary(&self, coeffs: &[f64], x: f64) -> f64 {
        coeffs.iter().enumerate().map(|(i, c)| c * boundary_mode(i + 1, x)).sum()
    }
}
