use serde::{Deserialize, Serialize};

use super::{find_threshold_with, Condition, ThresholdResult, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::povm::{validate_params, MeasurementParams};
use crate::protocol::{MrScores, Simulator};
use crate::spin::SpinSystem;

/// How `γ` is chosen for each spin in a trend check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "value", rename_all = "snake_case")]
pub enum GammaRule {
    Zero,
    /// `γ = 1/(2j)`, the middle of the admissible range.
    HalfCeiling,
    Fixed(f64),
}

impl GammaRule {
    pub fn gamma(self, sys: SpinSystem) -> f64 {
        match self {
            GammaRule::Zero => 0.0,
            GammaRule::HalfCeiling => 1.0 / (2.0 * sys.j()),
            GammaRule::Fixed(g) => g,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub two_j: u32,
    pub gamma: f64,
    /// Upper end `1/j` of the admissible γ range.
    pub gamma_ceiling: f64,
    pub lgi: ThresholdResult,
    pub wlgi: ThresholdResult,
    /// Scores at the requested λ, or `None` when λ is outside `[0, 1 - jγ]`.
    pub scores: Option<MrScores>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendComparison {
    pub quantity: String,
    pub from_two_j: u32,
    pub to_two_j: u32,
    pub from: f64,
    pub to: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendReport {
    pub rule: GammaRule,
    pub lambda: f64,
    pub points: Vec<TrendPoint>,
    pub comparisons: Vec<TrendComparison>,
}

impl TrendReport {
    pub fn holds(&self) -> bool {
        self.comparisons.iter().all(|c| c.holds)
    }
}

/// Slack for comparing thresholds resolved to `DEFAULT_TOL`.
const THRESHOLD_SLACK: f64 = 2.0 * DEFAULT_TOL;

/// Checks that λ_th (LGI and WLGI) does not grow with `j` and that the γ
/// ceiling `1/j` shrinks, over a strictly ascending list of spins. Also
/// records the violation magnitudes at `lambda` where it is admissible.
/// A single-spin list has no comparisons and holds vacuously.
pub fn asymptotic_trend_check(two_j_list: &[u32], lambda: f64, rule: GammaRule) -> Result<TrendReport> {
    if two_j_list.is_empty() {
        return Err(Error::InvalidArgument("trend check needs at least one spin".into()));
    }
    if two_j_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("spin list must be strictly ascending".into()));
    }

    let mut points = Vec::with_capacity(two_j_list.len());
    for &two_j in two_j_list {
        let sys = SpinSystem::new(two_j);
        let gamma = rule.gamma(sys);
        let sim = Simulator::new(sys);
        let lgi = find_threshold_with(&sim, gamma, Condition::Lgi, DEFAULT_TOL)?;
        let wlgi = find_threshold_with(&sim, gamma, Condition::Wlgi, DEFAULT_TOL)?;
        let params = MeasurementParams::new(lambda, gamma);
        let scores = if validate_params(sys, params).is_valid() { Some(sim.evaluate(params)?) } else { None };
        points.push(TrendPoint { two_j, gamma, gamma_ceiling: 1.0 / sys.j(), lgi, wlgi, scores });
    }

    let mut comparisons = Vec::new();
    for w in points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let cmp = |quantity: &str, from: f64, to: f64, holds: bool| TrendComparison {
            quantity: quantity.into(),
            from_two_j: a.two_j,
            to_two_j: b.two_j,
            from,
            to,
            holds,
        };
        let (l0, l1) = (a.lgi.value_or_ceiling(), b.lgi.value_or_ceiling());
        comparisons.push(cmp("lambda_th_lgi", l0, l1, l1 <= l0 + THRESHOLD_SLACK));
        let (w0, w1) = (a.wlgi.value_or_ceiling(), b.wlgi.value_or_ceiling());
        comparisons.push(cmp("lambda_th_wlgi", w0, w1, w1 <= w0 + THRESHOLD_SLACK));
        comparisons.push(cmp(
            "gamma_ceiling",
            a.gamma_ceiling,
            b.gamma_ceiling,
            b.gamma_ceiling < a.gamma_ceiling,
        ));
    }

    Ok(TrendReport { rule, lambda, points, comparisons })
}
