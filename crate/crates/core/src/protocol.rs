//! Three-time sequential measurement protocol and macrorealism functionals.
//!
//! A spin-j starts in `|-j⟩` and precesses under `H = Ω J_x`. The dichotomic
//! observable is `Q = -1` for outcome `m = -j` and `Q = +1` otherwise, read
//! out at phases `Ω t₁ = π`, `Ω t₂ = 3π/2`, `Ω t₃ = 2π`.
//!
//! Each two-time probability comes from its own run-set that measures only at
//! those two times. The first measurement is a fine-grained Lüders update
//! with `√F^k` for every outcome `k`; grouping into `Q = ±1` is applied to
//! probabilities only. Because the initial state is pure and each Kraus
//! operator is a single diagonal matrix, every branch stays a pure
//! (unnormalized) vector, which is what the simulator propagates.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::povm::{build_effects, validate_params, BiasedUnsharpPovm, MeasurementParams};
use crate::spin::{CMatrix, CVector, JxEigenbasis, Propagator, SpinSystem};

/// Tolerance for probability sanity checks.
pub const PROBABILITY_TOL: f64 = 1e-10;

/// Dichotomic outcome `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn value(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    fn slot(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Time {
    T1,
    T2,
    T3,
}

impl Time {
    /// Accumulated phase `Ω t` since preparation.
    pub fn phase(self) -> f64 {
        match self {
            Time::T1 => ProtocolSpec::PHASE_TO_T1,
            Time::T2 => ProtocolSpec::PHASE_TO_T1 + ProtocolSpec::PHASE_BETWEEN,
            Time::T3 => ProtocolSpec::PHASE_TO_T1 + 2.0 * ProtocolSpec::PHASE_BETWEEN,
        }
    }

    pub fn from_index(i: u8) -> Option<Self> {
        match i {
            1 => Some(Time::T1),
            2 => Some(Time::T2),
            3 => Some(Time::T3),
            _ => None,
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

/// Measurement pair of one run-set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pair {
    T1T2,
    T2T3,
    T1T3,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::T1T2, Pair::T2T3, Pair::T1T3];

    pub fn times(self) -> (Time, Time) {
        match self {
            Pair::T1T2 => (Time::T1, Time::T2),
            Pair::T2T3 => (Time::T2, Time::T3),
            Pair::T1T3 => (Time::T1, Time::T3),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Pair::T1T2 => "12",
            Pair::T2T3 => "23",
            Pair::T1T3 => "13",
        }
    }
}

/// Full description of one protocol instance.
///
/// Timing, initial state and dichotomization are fixed; only the spin and
/// the measurement parameters vary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub sys: SpinSystem,
    pub params: MeasurementParams,
}

impl ProtocolSpec {
    pub const PHASE_TO_T1: f64 = PI;
    pub const PHASE_BETWEEN: f64 = FRAC_PI_2;

    pub fn new(sys: SpinSystem, params: MeasurementParams) -> Result<Self> {
        validate_params(sys, params).into_result()?;
        Ok(Self { sys, params })
    }

    /// `|-j⟩⟨-j|`.
    pub fn initial_state(&self) -> CMatrix {
        let n = self.sys.dim();
        let mut rho = DMatrix::zeros(n, n);
        rho[(0, 0)] = C64::new(1.0, 0.0);
        rho
    }

    /// One-versus-remaining grouping of basis index `index`.
    pub fn dichotomize(index: usize) -> Outcome {
        if index == 0 {
            Outcome::Minus
        } else {
            Outcome::Plus
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub plus: f64,
    pub minus: f64,
}

impl Distribution {
    pub fn get(&self, q: Outcome) -> f64 {
        match q {
            Outcome::Plus => self.plus,
            Outcome::Minus => self.minus,
        }
    }
}

/// Joint distribution of `(Q_a, Q_b)` for one run-set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointProbabilityTable {
    pub pair: Pair,
    /// Indexed `[q_a][q_b]` with slot 0 = `+1`, slot 1 = `-1`.
    pub probs: [[f64; 2]; 2],
}

impl JointProbabilityTable {
    pub fn get(&self, qa: Outcome, qb: Outcome) -> f64 {
        self.probs[qa.slot()][qb.slot()]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().flatten().sum()
    }

    /// Marginal distribution of the earlier measurement.
    pub fn first_marginal(&self) -> Distribution {
        Distribution { plus: self.probs[0][0] + self.probs[0][1], minus: self.probs[1][0] + self.probs[1][1] }
    }

    /// Entries clamped to `[0, 1]` for reporting.
    pub fn clamped(&self) -> [[f64; 2]; 2] {
        self.probs.map(|row| row.map(|p| p.clamp(0.0, 1.0)))
    }

    pub fn correlator(&self) -> f64 {
        correlator(self)
    }
}

/// `⟨Q_a Q_b⟩ = Σ q_a q_b P(q_a, q_b)`.
pub fn correlator(table: &JointProbabilityTable) -> f64 {
    let mut c = 0.0;
    for qa in Outcome::BOTH {
        for qb in Outcome::BOTH {
            c += qa.value() * qb.value() * table.get(qa, qb);
        }
    }
    c
}

/// Values of the three macrorealism functionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MrScores {
    /// `C₁₂ + C₂₃ - C₁₃` (classical bound 1).
    pub k_lgi: f64,
    /// `K_LGI - 1`; positive values are violations.
    pub lgi_violation: f64,
    /// `P(Q₂+,Q₃+) - P(Q₁-,Q₂+) - P(Q₁+,Q₃+)` (classical bound 0).
    pub k_wlgi: f64,
    /// `P(Q₃=-1) - [P(Q₂+,Q₃-) + P(Q₂-,Q₃-)]`, signed (zero under macrorealism).
    pub k_nsit: f64,
}

impl MrScores {
    pub fn wlgi_violation(&self) -> f64 {
        self.k_wlgi.max(0.0)
    }

    pub fn nsit_violation(&self) -> f64 {
        self.k_nsit.abs()
    }
}

/// Precomputed propagators and evolved pure states for one spin system.
///
/// Building this once and reusing it for many `(λ, γ)` points is what makes
/// sweeps and threshold searches cheap; the results are identical to the
/// one-shot free functions.
#[derive(Debug, Clone)]
pub struct Simulator {
    sys: SpinSystem,
    /// `exp(-i (π/2) J_x)`, the gap between adjacent measurement times.
    step: Propagator,
    /// `exp(-i π J_x)`, the gap between t₁ and t₃.
    double_step: Propagator,
    /// Unmeasured state at t₁, t₂, t₃.
    states: [CVector; 3],
}

impl Simulator {
    pub fn new(sys: SpinSystem) -> Self {
        let basis = JxEigenbasis::new(sys);
        let step = basis.propagator(ProtocolSpec::PHASE_BETWEEN);
        let double_step = basis.propagator(2.0 * ProtocolSpec::PHASE_BETWEEN);
        // Propagating |-j⟩ picks out column 0.
        let states = [Time::T1, Time::T2, Time::T3]
            .map(|t| basis.propagator(t.phase()).matrix().column(0).into_owned());
        Self { sys, step, double_step, states }
    }

    pub fn sys(&self) -> SpinSystem {
        self.sys
    }

    pub fn unmeasured_state(&self, t: Time) -> &CVector {
        &self.states[t.slot()]
    }

    fn gap(&self, pair: Pair) -> &Propagator {
        match pair {
            Pair::T1T2 | Pair::T2T3 => &self.step,
            Pair::T1T3 => &self.double_step,
        }
    }

    /// Grouped effect diagonals `[Σ_{m ≠ -j} F^m, F^{-j}]`.
    fn grouped(povm: &BiasedUnsharpPovm) -> [Vec<f64>; 2] {
        let n = povm.sys().dim();
        [povm.sum_diagonal(1..n), povm.sum_diagonal(0..1)]
    }

    fn povm(&self, params: MeasurementParams) -> Result<BiasedUnsharpPovm> {
        build_effects(self.sys, params)
    }

    pub fn single_time(&self, params: MeasurementParams, t: Time) -> Result<Distribution> {
        let povm = self.povm(params)?;
        Ok(single_from(&Self::grouped(&povm), self.unmeasured_state(t)))
    }

    pub fn joint(&self, params: MeasurementParams, pair: Pair) -> Result<JointProbabilityTable> {
        let povm = self.povm(params)?;
        self.joint_with(&povm, &Self::grouped(&povm), pair)
    }

    fn joint_with(
        &self,
        povm: &BiasedUnsharpPovm,
        grouped: &[Vec<f64>; 2],
        pair: Pair,
    ) -> Result<JointProbabilityTable> {
        let (first, _) = pair.times();
        let psi = self.unmeasured_state(first);
        let gap = self.gap(pair);
        let mut probs = [[0.0; 2]; 2];
        for (k, effect) in povm.effects().iter().enumerate() {
            let qa = ProtocolSpec::dichotomize(k);
            // √F^k ψ, unnormalized; its squared norm is the outcome weight.
            let branch =
                CVector::from_iterator(psi.len(), psi.iter().zip(&effect.sqrt_diagonal).map(|(a, s)| a * *s));
            let evolved = gap.apply(&branch);
            for qb in Outcome::BOTH {
                probs[qa.slot()][qb.slot()] += expectation(&grouped[qb.slot()], &evolved);
            }
        }
        let table = JointProbabilityTable { pair, probs };
        check_table(&table)?;
        Ok(table)
    }

    pub fn evaluate(&self, params: MeasurementParams) -> Result<MrScores> {
        use Outcome::{Minus, Plus};
        let povm = self.povm(params)?;
        let grouped = Self::grouped(&povm);
        let p12 = self.joint_with(&povm, &grouped, Pair::T1T2)?;
        let p23 = self.joint_with(&povm, &grouped, Pair::T2T3)?;
        let p13 = self.joint_with(&povm, &grouped, Pair::T1T3)?;
        let p3 = single_from(&grouped, self.unmeasured_state(Time::T3));

        let k_lgi = correlator(&p12) + correlator(&p23) - correlator(&p13);
        let k_wlgi = p23.get(Plus, Plus) - p12.get(Minus, Plus) - p13.get(Plus, Plus);
        let k_nsit = p3.minus - (p23.get(Plus, Minus) + p23.get(Minus, Minus));
        Ok(MrScores { k_lgi, lgi_violation: k_lgi - 1.0, k_wlgi, k_nsit })
    }
}

/// `Σ_m diag[m] |ψ_m|²`.
fn expectation(diag: &[f64], psi: &CVector) -> f64 {
    diag.iter().zip(psi.iter()).map(|(d, a)| d * a.norm_sqr()).sum()
}

fn single_from(grouped: &[Vec<f64>; 2], psi: &CVector) -> Distribution {
    Distribution { plus: expectation(&grouped[0], psi), minus: expectation(&grouped[1], psi) }
}

fn check_table(table: &JointProbabilityTable) -> Result<()> {
    for p in table.probs.iter().flatten() {
        if !(*p >= -PROBABILITY_TOL && *p <= 1.0 + PROBABILITY_TOL) {
            return Err(Error::Numerical(format!(
                "joint probability {p} for pair {} outside [0, 1]",
                table.pair.label()
            )));
        }
    }
    let total = table.total();
    if (total - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::Numerical(format!("joint table for pair {} sums to {total}", table.pair.label())));
    }
    Ok(())
}

pub fn single_time_distribution(spec: &ProtocolSpec, time: Time) -> Result<Distribution> {
    Simulator::new(spec.sys).single_time(spec.params, time)
}

pub fn joint_distribution(spec: &ProtocolSpec, pair: Pair) -> Result<JointProbabilityTable> {
    Simulator::new(spec.sys).joint(spec.params, pair)
}

pub fn evaluate_mr(spec: &ProtocolSpec) -> Result<MrScores> {
    Simulator::new(spec.sys).evaluate(spec.params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(two_j: u32, lambda: f64, gamma: f64) -> ProtocolSpec {
        ProtocolSpec::new(SpinSystem::new(two_j), MeasurementParams::new(lambda, gamma)).unwrap()
    }

    #[test]
    fn time_phases() {
        assert_eq!(Time::T1.phase(), PI);
        assert_eq!(Time::T2.phase(), 1.5 * PI);
        assert_eq!(Time::T3.phase(), 2.0 * PI);
    }

    #[test]
    fn initial_state_and_grouping() {
        let s = spec(5, 0.5, 0.1);
        let rho = s.initial_state();
        assert_eq!(rho.trace().re, 1.0);
        assert_eq!(rho[(0, 0)].re, 1.0);
        let minus = (0..6).filter(|&i| ProtocolSpec::dichotomize(i) == Outcome::Minus).count();
        assert_eq!(minus, 1);
    }

    #[test]
    fn sharp_integer_spin_returns_home_at_t3() {
        let d = single_time_distribution(&spec(4, 1.0, 0.0), Time::T3).unwrap();
        assert!((d.minus - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trivial_measurement_single_time() {
        for t in [Time::T1, Time::T2, Time::T3] {
            let d = single_time_distribution(&spec(6, 0.0, 0.2), t).unwrap();
            let expected = (1.0 - 3.0 * 0.2) / 7.0;
            assert!((d.minus - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn single_time_spin15_t3() {
        // Dense 31x31 oracle: 16/31 (state returns to |-j⟩ after 2π).
        let d = single_time_distribution(&spec(30, 0.5, 0.0), Time::T3).unwrap();
        assert!((d.minus - 0.516_129_032_258_064_5).abs() < 1e-10);
    }

    #[test]
    fn spin_half_sharp_correlators() {
        let s = spec(1, 1.0, 0.0);
        let c13 = joint_distribution(&s, Pair::T1T3).unwrap().correlator();
        let c12 = joint_distribution(&s, Pair::T1T2).unwrap().correlator();
        assert!((c13 + 1.0).abs() < 1e-12);
        assert!(c12.abs() < 1e-12);
    }

    #[test]
    fn correlator_of_fixed_tables() {
        let t = JointProbabilityTable { pair: Pair::T1T2, probs: [[1.0, 0.0], [0.0, 0.0]] };
        assert_eq!(correlator(&t), 1.0);
        let t = JointProbabilityTable { pair: Pair::T1T2, probs: [[0.25; 2]; 2] };
        assert_eq!(correlator(&t), 0.0);
    }

    #[test]
    fn trivial_measurement_factorizes() {
        let s = spec(8, 0.0, 0.15);
        let single = single_time_distribution(&s, Time::T1).unwrap();
        for pair in Pair::ALL {
            let t = joint_distribution(&s, pair).unwrap();
            for qa in Outcome::BOTH {
                for qb in Outcome::BOTH {
                    let want = single.get(qa) * single.get(qb);
                    assert!((t.get(qa, qb) - want).abs() < 1e-14);
                }
            }
        }
        let scores = evaluate_mr(&s).unwrap();
        assert!(scores.k_nsit.abs() < 1e-14);
        assert!(scores.lgi_violation <= 0.0);
    }

    #[test]
    fn table3_first_row() {
        let scores = evaluate_mr(&spec(30, 0.5, 0.0)).unwrap();
        assert!((scores.lgi_violation - 0.2504).abs() < 5e-5);
        assert!((scores.k_wlgi - 0.1410).abs() < 1e-4);
        assert!((scores.k_nsit.abs() - 0.1569).abs() < 5e-5);
    }

    #[test]
    fn table3_j25_top_gamma() {
        let scores = evaluate_mr(&spec(50, 0.5, 0.020)).unwrap();
        assert!((scores.lgi_violation - 0.3484).abs() < 5e-5);
        assert!((scores.k_wlgi - 0.1742).abs() < 5e-5);
        assert!((scores.k_nsit - 0.1742).abs() < 5e-5);
    }

    #[test]
    fn rejects_invalid_spec() {
        let err = ProtocolSpec::new(SpinSystem::new(30), MeasurementParams::new(0.9, 0.05)).unwrap_err();
        assert!(err.is_invalid_input());
    }
}
