use serde::{Deserialize, Serialize};

use super::{MultiOrderProblem, SolveError};
use crate::fraccalc::{ln_gamma, TimeGrid};

/// Smallest power of the Picard operator certified to contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionCertificate {
    pub t_m: f64,
    pub m_star: usize,
    pub bound: f64,
    /// (ℓ T_M T^{α_min})^m / Γ(m α_min + 1) for m = 1..=m_star
    pub sequence: Vec<f64>,
}

const MAX_POWER: usize = 1_000_000;

/// T_M = 2n max{T^{α_max - α_min}, 1}; m* = min{m : (ℓ T_M T^{α_min})^m / Γ(m α_min + 1) < 1}.
pub fn contraction_certificate(p: &MultiOrderProblem, grid: &TimeGrid) -> Result<ContractionCertificate, SolveError> {
    let horizon = grid.horizon();
    let n = p.dim() as f64;
    let lo = p.orders().iter().map(|o| o.value()).fold(f64::INFINITY, f64::min);
    let hi = p.orders().iter().map(|o| o.value()).fold(0.0, f64::max);
    let t_m = 2.0 * n * horizon.powf(hi - lo).max(1.0);
    let base = p.lipschitz() * t_m * horizon.powf(lo);
    if base == 0.0 {
        return Ok(ContractionCertificate {
            t_m,
            m_star: 1,
            bound: 0.0,
            sequence: vec![0.0],
        });
    }
    let ln_base = base.ln();
    let mut sequence = Vec::new();
    for m in 1..=MAX_POWER {
        let ln_bound = m as f64 * ln_base - ln_gamma(m as f64 * lo + 1.0)?;
        if ln_bound > f64::MAX.ln() {
            return Err(SolveError::CertificateOverflow { m });
        }
        let bound = ln_bound.exp();
        sequence.push(bound);
        if bound < 1.0 {
            return Ok(ContractionCertificate {
                t_m,
                m_star: m,
                bound,
                sequence,
            });
        }
    }
    Err(SolveError::CertificateOverflow { m: MAX_POWER })
}
