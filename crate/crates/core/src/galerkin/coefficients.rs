use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::GalerkinError;

/// c + a sin(πx) + b x on the top edge. Closed under addition, so coefficient
/// perturbations stay in the same family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct CoefficientField {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub sine: f64,
    #[serde(default)]
    pub slope: f64,
}

impl CoefficientField {
    pub fn constant(c: f64) -> Self {
        Self {
            constant: c,
            ..Self::default()
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.constant + self.sine * (PI * x).sin() + self.slope * x
    }

    pub fn plus(&self, other: &CoefficientField, scale: f64) -> Self {
        Self {
            constant: self.constant + scale * other.constant,
            sine: self.sine + scale * other.sine,
            slope: self.slope + scale * other.slope,
        }
    }

    /// Named presets: unit, zero, sine (1 + ½ sin πx), ramp (2 - x).
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "unit" => Some(Self::constant(1.0)),
            "zero" => Some(Self::constant(0.0)),
            "sine" => Some(Self {
                constant: 1.0,
                sine: 0.5,
                slope: 0.0,
            }),
            "ramp" => Some(Self {
                constant: 2.0,
                sine: 0.0,
                slope: -1.0,
            }),
            _ => None,
        }
    }

    pub const PRESETS: [&'static str; 4] = ["unit", "zero", "sine", "ramp"];
}

/// Extrema of one coefficient over the closed edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extrema {
    pub min: f64,
    pub max: f64,
    pub argmin: f64,
}

const SAMPLES: usize = 2000;

fn extrema(field: &CoefficientField, extra: &[f64]) -> Extrema {
    let mut e = Extrema {
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        argmin: 0.0,
    };
    let lattice = (0..=SAMPLES).map(|i| i as f64 / SAMPLES as f64);
    // the sine term peaks at the midpoint, already on the lattice
    for x in lattice.chain(extra.iter().copied()) {
        let v = field.eval(x);
        if v < e.min {
            e.min = v;
            e.argmin = x;
        }
        e.max = e.max.max(v);
    }
    e
}

/// f, g, h on the top edge with their sampled extrema.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCoefficients {
    pub f: CoefficientField,
    pub g: CoefficientField,
    pub h: CoefficientField,
    pub f_range: Extrema,
    pub g_range: Extrema,
    pub h_range: Extrema,
}

impl BoundaryCoefficients {
    /// Requires f > 0, h > 0 and g ≥ 0 on a uniform lattice of the edge.
    pub fn new(f: CoefficientField, g: CoefficientField, h: CoefficientField) -> Result<Self, GalerkinError> {
        let c = Self {
            f,
            g,
            h,
            f_range: extrema(&f, &[]),
            g_range: extrema(&g, &[]),
            h_range: extrema(&h, &[]),
        };
        c.check_ranges()?;
        Ok(c)
    }

    fn check_ranges(&self) -> Result<(), GalerkinError> {
        for (name, r, strict) in [("f", self.f_range, true), ("g", self.g_range, false), ("h", self.h_range, true)] {
            let bad = if strict { !(r.min > 0.0) } else { !(r.min >= 0.0) };
            if bad || !r.max.is_finite() {
                return Err(GalerkinError::Coefficient {
                    name,
                    x: r.argmin,
                    value: r.min,
                });
            }
        }
        Ok(())
    }

    /// Folds extra sample points (quadrature nodes) into the extrema and
    /// re-checks the sign conditions.
    pub fn check_at(&mut self, nodes: &[f64]) -> Result<(), GalerkinError> {
        self.f_range = extrema(&self.f, nodes);
        self.g_range = extrema(&self.g, nodes);
        self.h_range = extrema(&self.h, nodes);
        self.check_ranges()
    }

    /// Unit f and h, zero g.
    pub fn conservative() -> Self {
        Self::new(CoefficientField::constant(1.0), CoefficientField::constant(0.0), CoefficientField::constant(1.0))
            .expect("constant coefficients are admissible")
    }

    pub fn f0(&self) -> f64 {
        self.f_range.min
    }

    pub fn f1(&self) -> f64 {
        self.f_range.max
    }

    pub fn g0(&self) -> f64 {
        self.g_range.min
    }

    pub fn g1(&self) -> f64 {
        self.g_range.max
    }

    pub fn h1(&self) -> f64 {
        self.h_range.max
    }
}
