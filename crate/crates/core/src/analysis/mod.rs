//! Threshold sharpness search and parameter sweeps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::povm::{validate_params, MeasurementParams};
use crate::protocol::{MrScores, Simulator};
use crate::spin::SpinSystem;

mod tables;
mod trend;

pub use tables::{
    reproduce_table1, reproduce_table2, reproduce_table3, reproduce_table3_exact_gamma, reproduce_tables,
    MagnitudeCell, TablesReport, ThresholdCell, MAGNITUDE_TOL, THRESHOLD_TOL,
};
pub use trend::{asymptotic_trend_check, GammaRule, TrendComparison, TrendPoint, TrendReport};

/// Values at or below this are treated as "no violation".
pub const VIOLATION_EPS: f64 = 1e-9;
/// Default λ resolution of the threshold bisection.
pub const DEFAULT_TOL: f64 = 1e-6;
/// Number of λ points in the sign-change pre-scan.
pub const SCAN_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Lgi,
    Wlgi,
    Nsit,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::Lgi, Condition::Wlgi, Condition::Nsit];

    /// Violation magnitude: `K_LGI - 1`, `K_WLGI`, or `|K_NSIT|`.
    pub fn violation(self, scores: &MrScores) -> f64 {
        match self {
            Condition::Lgi => scores.lgi_violation,
            Condition::Wlgi => scores.k_wlgi,
            Condition::Nsit => scores.k_nsit.abs(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Condition::Lgi => "lgi",
            Condition::Wlgi => "wlgi",
            Condition::Nsit => "nsit",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lgi" => Ok(Condition::Lgi),
            "wlgi" => Ok(Condition::Wlgi),
            "nsit" => Ok(Condition::Nsit),
            other => Err(Error::InvalidArgument(format!("unknown condition `{other}`"))),
        }
    }
}

/// Threshold sharpness for one condition at fixed `(j, γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub condition: Condition,
    pub two_j: u32,
    pub gamma: f64,
    /// `None` when the condition is not violated anywhere on `(0, 1 - jγ]`.
    pub lambda_th: Option<f64>,
    /// Final λ bracket around the crossing.
    pub bracket: (f64, f64),
    pub iterations: u32,
    /// The violation extends all the way down to λ → 0.
    pub persists_to_zero: bool,
}

impl ThresholdResult {
    pub fn no_violation(&self) -> bool {
        self.lambda_th.is_none()
    }

    /// λ_th for reporting, with "no violation" mapped to the top of the range.
    pub fn value_or_ceiling(&self) -> f64 {
        self.lambda_th.unwrap_or(1.0 - f64::from(self.two_j) / 2.0 * self.gamma)
    }
}

pub fn find_threshold(
    sys: SpinSystem,
    gamma: f64,
    condition: Condition,
    tol: f64,
) -> Result<ThresholdResult> {
    find_threshold_with(&Simulator::new(sys), gamma, condition, tol)
}

/// [`find_threshold`] reusing a prepared simulator.
///
/// The violation is first sampled on `SCAN_POINTS` equally spaced λ in
/// `(0, 1 - jγ]`. A single non-violating → violating change is bisected to
/// `tol`. If every sample violates, λ is halved from the smallest sample
/// toward `tol`: a clearly negative value there is a crossing (bisected), and
/// reaching numerical zero or `tol` without one means the violation persists
/// to λ = 0. The second stage is needed because `|K_NSIT|` vanishes like λ³
/// and is lost in round-off well above any practical `tol`.
pub fn find_threshold_with(
    sim: &Simulator,
    gamma: f64,
    condition: Condition,
    tol: f64,
) -> Result<ThresholdResult> {
    let sys = sim.sys();
    validate_params(sys, MeasurementParams::new(0.0, gamma)).into_result()?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("threshold tolerance {tol} must be positive")));
    }
    let ceiling = (1.0 - sys.j() * gamma).max(0.0);
    let violation = |lambda: f64| -> Result<f64> {
        let scores = sim.evaluate(MeasurementParams::new(lambda, gamma))?;
        Ok(condition.violation(&scores))
    };
    let mut result = ThresholdResult {
        condition,
        two_j: sys.two_j(),
        gamma,
        lambda_th: None,
        bracket: (0.0, ceiling),
        iterations: 0,
        persists_to_zero: false,
    };

    let grid: Vec<f64> = (1..=SCAN_POINTS).map(|i| ceiling * i as f64 / SCAN_POINTS as f64).collect();
    let violating =
        grid.iter().map(|&l| violation(l).map(|v| v > VIOLATION_EPS)).collect::<Result<Vec<bool>>>()?;
    let changes: Vec<usize> = (0..grid.len() - 1).filter(|&i| violating[i] != violating[i + 1]).collect();

    match (changes.len(), violating[0]) {
        (0, false) => Ok(result),
        (0, true) => {
            let mut upper = grid[0];
            loop {
                let lambda = upper / 2.0;
                if lambda < tol {
                    break;
                }
                let v = violation(lambda)?;
                result.iterations += 1;
                if v > VIOLATION_EPS {
                    upper = lambda;
                } else if v < -VIOLATION_EPS {
                    return bisect(&violation, lambda, upper, tol, result);
                } else {
                    break;
                }
            }
            result.lambda_th = Some(0.0);
            result.bracket = (0.0, upper);
            result.persists_to_zero = true;
            Ok(result)
        }
        (1, false) => {
            let i = changes[0];
            bisect(&violation, grid[i], grid[i + 1], tol, result)
        }
        (1, true) => Err(Error::ReversedCrossing { condition: condition.to_string() }),
        (n, _) => Err(Error::MultipleCrossings { condition: condition.to_string(), crossings: n }),
    }
}

/// Bisect between a non-violating `lo` and a violating `hi`.
fn bisect(
    violation: &impl Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    mut result: ThresholdResult,
) -> Result<ThresholdResult> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if violation(mid)? > VIOLATION_EPS {
            hi = mid;
        } else {
            lo = mid;
        }
        result.iterations += 1;
    }
    result.lambda_th = Some(0.5 * (lo + hi));
    result.bracket = (lo, hi);
    Ok(result)
}

/// One point of a γ sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub two_j: u32,
    pub lambda: f64,
    pub gamma: f64,
    pub k_lgi: f64,
    pub lgi_violation: f64,
    pub k_wlgi: f64,
    pub k_nsit: f64,
}

impl SweepRow {
    pub fn new(sys: SpinSystem, params: MeasurementParams, scores: &MrScores) -> Self {
        Self {
            two_j: sys.two_j(),
            lambda: params.lambda,
            gamma: params.gamma,
            k_lgi: scores.k_lgi,
            lgi_violation: scores.lgi_violation,
            k_wlgi: scores.k_wlgi,
            k_nsit: scores.k_nsit,
        }
    }
}

/// Evaluate every `γ` in `gamma_grid` at fixed `λ`, preserving grid order.
///
/// The whole grid is validated before anything is computed.
pub fn sweep_gamma(sys: SpinSystem, lambda: f64, gamma_grid: &[f64]) -> Result<Vec<SweepRow>> {
    for (index, &gamma) in gamma_grid.iter().enumerate() {
        if let Some(constraint) = validate_params(sys, MeasurementParams::new(lambda, gamma)).binding {
            return Err(Error::InvalidGridPoint { index, lambda, gamma, constraint });
        }
    }
    if gamma_grid.is_empty() {
        return Ok(Vec::new());
    }
    let sim = Simulator::new(sys);
    gamma_grid
        .par_iter()
        .map(|&gamma| {
            let params = MeasurementParams::new(lambda, gamma);
            sim.evaluate(params).map(|s| SweepRow::new(sys, params, &s))
        })
        .collect()
}

/// `count` equally spaced values from `start` to `stop` inclusive; the last
/// value is exactly `stop`.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count).map(|i| if i + 1 == count { stop } else { start + step * i as f64 }).collect()
        }
    }
}
