//! Biased unsharp `J_z` measurements on a spin-j system.
//!
//! The effect for outcome `m` is
//!
//! ```text
//! F^m = λ P^m + (1 + m γ - λ) / (2j + 1) · 𝟙
//! ```
//!
//! with sharpness `λ` and biasedness `γ`. Every effect is diagonal in the
//! `J_z` basis, so effects and their square roots are stored as diagonals.
//!
//! For `j = 1/2` this family is the familiar qubit biased unsharp measurement
//! `λ P^± + (1 ± γ' - λ)/2 · 𝟙` with `γ' = γ / 2`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::SpinSystem;

/// Slack allowed when comparing parameters against the region boundaries.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementParams {
    /// Sharpness.
    pub lambda: f64,
    /// Biasedness.
    pub gamma: f64,
}

impl MeasurementParams {
    pub const fn new(lambda: f64, gamma: f64) -> Self {
        Self { lambda, gamma }
    }

    /// Projective, unbiased measurement.
    pub const fn sharp() -> Self {
        Self { lambda: 1.0, gamma: 0.0 }
    }
}

/// An inequality of the admissible region that a parameter pair violates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum Constraint {
    /// Spin 0 admits no biasedness range (`γ ≤ 1/j` is undefined).
    DegenerateSpin,
    NonFinite,
    GammaNegative {
        gamma: f64,
    },
    /// `γ ≤ 1/j`.
    GammaAboveCeiling {
        gamma: f64,
        ceiling: f64,
    },
    LambdaNegative {
        lambda: f64,
    },
    /// `λ ≤ 1 - jγ`.
    LambdaAboveCeiling {
        lambda: f64,
        ceiling: f64,
    },
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Constraint::DegenerateSpin => write!(f, "spin 0 has no admissible biasedness range"),
            Constraint::NonFinite => write!(f, "λ and γ must be finite"),
            Constraint::GammaNegative { gamma } => {
                write!(f, "γ = {} is negative (requires 0 ≤ γ ≤ 1/j)", short(gamma))
            }
            Constraint::GammaAboveCeiling { gamma, ceiling } => {
                write!(f, "γ exceeds 1/j = {} (γ = {})", short(ceiling), short(gamma))
            }
            Constraint::LambdaNegative { lambda } => {
                write!(f, "λ = {} is negative (requires 0 ≤ λ ≤ 1 − jγ)", short(lambda))
            }
            Constraint::LambdaAboveCeiling { lambda, ceiling } => {
                write!(f, "λ exceeds 1 − jγ = {} (λ = {})", short(ceiling), short(lambda))
            }
        }
    }
}

/// Up to 12 significant decimals with trailing zeros dropped, for messages.
fn short(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Outcome of [`validate_params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Validity {
    /// First violated inequality, `None` when the pair is admissible.
    pub binding: Option<Constraint>,
    /// `1/j` (infinite for spin 0).
    pub gamma_ceiling: f64,
    /// `1 - jγ`.
    pub lambda_ceiling: f64,
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        self.binding.is_none()
    }

    pub fn into_result(self) -> Result<()> {
        match self.binding {
            None => Ok(()),
            Some(c) => Err(Error::InvalidParams(c)),
        }
    }
}

/// Checks `0 ≤ γ ≤ 1/j` and then `0 ≤ λ ≤ 1 - jγ`, both inclusive.
pub fn validate_params(sys: SpinSystem, params: MeasurementParams) -> Validity {
    let MeasurementParams { lambda, gamma } = params;
    let j = sys.j();
    let gamma_ceiling = if sys.two_j() == 0 { f64::INFINITY } else { 1.0 / j };
    let lambda_ceiling = 1.0 - j * gamma;
    let binding = if sys.two_j() == 0 {
        Some(Constraint::DegenerateSpin)
    } else if !lambda.is_finite() || !gamma.is_finite() {
        Some(Constraint::NonFinite)
    } else if gamma < -BOUNDARY_TOL {
        Some(Constraint::GammaNegative { gamma })
    } else if gamma > gamma_ceiling + BOUNDARY_TOL {
        Some(Constraint::GammaAboveCeiling { gamma, ceiling: gamma_ceiling })
    } else if lambda < -BOUNDARY_TOL {
        Some(Constraint::LambdaNegative { lambda })
    } else if lambda > lambda_ceiling + BOUNDARY_TOL {
        Some(Constraint::LambdaAboveCeiling { lambda, ceiling: lambda_ceiling })
    } else {
        None
    };
    Validity { binding, gamma_ceiling, lambda_ceiling }
}

/// One diagonal effect `F^m` and its square root.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    pub m: f64,
    pub diagonal: Vec<f64>,
    pub sqrt_diagonal: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasedUnsharpPovm {
    sys: SpinSystem,
    params: MeasurementParams,
    effects: Vec<Effect>,
}

/// Diagonal value of `F^m` at its own projector index.
pub fn on_projector_value(sys: SpinSystem, params: MeasurementParams, m: f64) -> f64 {
    let j = sys.j();
    (1.0 + 2.0 * j * params.lambda + m * params.gamma) / sys.dim() as f64
}

/// Diagonal value of `F^m` at every other index.
pub fn off_projector_value(sys: SpinSystem, params: MeasurementParams, m: f64) -> f64 {
    (1.0 + m * params.gamma - params.lambda) / sys.dim() as f64
}

pub fn build_effects(sys: SpinSystem, params: MeasurementParams) -> Result<BiasedUnsharpPovm> {
    validate_params(sys, params).into_result()?;
    let n = sys.dim();
    let effects = (0..n)
        .map(|k| {
            let m = sys.m_at(k);
            // Boundary round-off (|x| within tolerance of zero) is snapped to 0.
            let snap = |x: f64| if (-BOUNDARY_TOL..0.0).contains(&x) { 0.0 } else { x };
            let off = snap(off_projector_value(sys, params, m));
            let on = snap(on_projector_value(sys, params, m));
            let mut diagonal = vec![off; n];
            diagonal[k] = on;
            let sqrt_diagonal = diagonal.iter().map(|x| x.sqrt()).collect();
            Effect { m, diagonal, sqrt_diagonal }
        })
        .collect();
    Ok(BiasedUnsharpPovm { sys, params, effects })
}

impl BiasedUnsharpPovm {
    pub fn sys(&self) -> SpinSystem {
        self.sys
    }

    pub fn params(&self) -> MeasurementParams {
        self.params
    }

    /// Effects ordered by basis index (ascending `m`).
    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn effect(&self, index: usize) -> &Effect {
        &self.effects[index]
    }

    /// Diagonal of `Σ_m F^m`, which should be all ones.
    pub fn completeness_diagonal(&self) -> Vec<f64> {
        self.sum_diagonal(0..self.sys.dim())
    }

    /// Diagonal of the summed effects over the basis indices in `indices`.
    pub fn sum_diagonal(&self, indices: impl IntoIterator<Item = usize>) -> Vec<f64> {
        let mut acc = vec![0.0; self.sys.dim()];
        for k in indices {
            for (a, x) in acc.iter_mut().zip(&self.effects[k].diagonal) {
                *a += x;
            }
        }
        acc
    }

    pub fn min_diagonal_entry(&self) -> f64 {
        self.effects.iter().flat_map(|e| e.diagonal.iter().copied()).fold(f64::INFINITY, f64::min)
    }
}
