use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Coefficient of one interior eigenfunction w_{k,l}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeCoefficient {
    pub k: usize,
    pub l: usize,
    pub value: f64,
}

/// Coefficient of one boundary function z_k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryCoefficient {
    pub k: usize,
    pub value: f64,
}

/// Interior field: eigenfunction terms plus two closed-form shapes,
/// bubble x(1-x)(1+x)y(2-y) (zero normal derivative on the top edge) and
/// lift sin(πx)·y (normal derivative sin πx on the top edge).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SpatialField {
    #[serde(default)]
    pub modes: Vec<ModeCoefficient>,
    #[serde(default)]
    pub bubble: f64,
    #[serde(default)]
    pub lift: f64,
}

impl SpatialField {
    pub fn mode(k: usize, l: usize, value: f64) -> Self {
        Self {
            modes: vec![ModeCoefficient { k, l, value }],
            ..Self::default()
        }
    }

    pub fn has_closed_form(&self) -> bool {
        self.bubble != 0.0 || self.lift != 0.0
    }

    /// Closed-form part only; mode terms are projected exactly.
    pub fn closed_form(&self, x: f64, y: f64) -> f64 {
        self.bubble * x * (1.0 - x) * (1.0 + x) * y * (2.0 - y) + self.lift * (PI * x).sin() * y
    }

    pub fn plus(&self, other: &SpatialField, scale: f64) -> Self {
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().map(|m| ModeCoefficient {
            value: scale * m.value,
            ..*m
        }));
        Self {
            modes,
            bubble: self.bubble + scale * other.bubble,
            lift: self.lift + scale * other.lift,
        }
    }
}

/// Boundary field: z_k terms plus the closed-form parabola x(1-x).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct BoundaryField {
    #[serde(default)]
    pub modes: Vec<BoundaryCoefficient>,
    #[serde(default)]
    pub parabola: f64,
}

impl BoundaryField {
    pub fn closed_form(&self, x: f64) -> f64 {
        self.parabola * x * (1.0 - x)
    }

    pub fn plus(&self, other: &BoundaryField, scale: f64) -> Self {
        let mut modes = self.modes.clone();
        modes.extend(other.modes.iter().map(|m| BoundaryCoefficient {
            value: scale * m.value,
            ..*m
        }));
        Self {
            modes,
            parabola: self.parabola + scale * other.parabola,
        }
    }
}

/// u(0) = u0, u'(0) = u1, δ(0) = δ0 and, off-spec, a forced δ'(0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InitialData {
    #[serde(default)]
    pub u0: SpatialField,
    #[serde(default)]
    pub u1: SpatialField,
    #[serde(default)]
    pub delta0: BoundaryField,
    /// Replaces the compatible value δ'(0) = ∂u0/∂ν projected on Z_m.
    #[serde(default)]
    pub delta1_override: Option<Vec<f64>>,
}

impl InitialData {
    pub const PRESETS: [&'static str; 6] = ["zero", "single-mode", "velocity-mode", "two-mode", "boundary-mix", "bubble"];

    pub fn preset(name: &str) -> Option<Self> {
        let d = match name {
            "zero" => Self::default(),
            "single-mode" => Self {
                u0: SpatialField::mode(1, 1, 1.0),
                ..Self::default()
            },
            "velocity-mode" => Self {
                u1: SpatialField::mode(1, 1, 1.0),
                ..Self::default()
            },
            "two-mode" => Self {
                u0: SpatialField {
                    modes: vec![
                        ModeCoefficient { k: 1, l: 1, value: 1.0 },
                        ModeCoefficient { k: 1, l: 2, value: -0.5 },
                    ],
                    ..SpatialField::default()
                },
                u1: SpatialField::mode(2, 1, 0.5),
                ..Self::default()
            },
            "boundary-mix" => Self {
                u0: SpatialField::mode(1, 1, 1.0),
                delta0: BoundaryField {
                    modes: vec![
                        BoundaryCoefficient { k: 1, value: 0.3 },
                        BoundaryCoefficient { k: 2, value: 0.1 },
                    ],
                    parabola: 0.0,
                },
                ..Self::default()
            },
            "bubble" => Self {
                u0: SpatialField {
                    bubble: 1.0,
                    ..SpatialField::default()
                },
                ..Self::default()
            },
            _ => return None,
        };
        Some(d)
    }

    /// self + scale · other, with any override taken from self.
    pub fn plus(&self, other: &InitialData, scale: f64) -> Self {
        Self {
            u0: self.u0.plus(&other.u0, scale),
            u1: self.u1.plus(&other.u1, scale),
            delta0: self.delta0.plus(&other.delta0, scale),
            delta1_override: self.delta1_override.clone(),
        }
    }
}
