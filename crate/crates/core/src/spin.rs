//! Spin-j angular momentum operators and free precession about the x axis.
//!
//! All matrices use the `J_z` eigenbasis ordered by ascending magnetic
//! quantum number: basis index `i` holds `m = i - j`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::tridiag::{sym_tridiag_eigen, SymTridiagEigen};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

const HERMITIAN_TOL: f64 = 1e-12;

/// A spin-j system, stored as `2j` so half-integer spins are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpinSystem {
    two_j: u32,
}

impl SpinSystem {
    pub const fn new(two_j: u32) -> Self {
        Self { two_j }
    }

    /// Integer spin `j`.
    pub const fn from_integer_j(j: u32) -> Self {
        Self { two_j: 2 * j }
    }

    pub const fn two_j(self) -> u32 {
        self.two_j
    }

    pub fn j(self) -> f64 {
        f64::from(self.two_j) / 2.0
    }

    pub const fn dim(self) -> usize {
        self.two_j as usize + 1
    }

    pub fn is_integer(self) -> bool {
        self.two_j.is_multiple_of(2)
    }

    /// Magnetic quantum number stored at basis `index`.
    pub fn m_at(self, index: usize) -> f64 {
        debug_assert!(index < self.dim());
        index as f64 - self.j()
    }

    /// Basis index of magnetic quantum number `m`, if `m` belongs to the
    /// spectrum `{-j, ..., +j}`.
    pub fn index_of(self, m: f64) -> Option<usize> {
        let shifted = m + self.j();
        if !shifted.is_finite() || shifted.fract() != 0.0 || shifted < 0.0 {
            return None;
        }
        let idx = shifted as usize;
        (idx < self.dim()).then_some(idx)
    }

    pub fn magnetic_numbers(self) -> impl Iterator<Item = f64> {
        (0..self.dim()).map(move |i| self.m_at(i))
    }
}

/// Complex Hermitian matrix in the `J_z` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(CMatrix);

impl HermitianOperator {
    /// Wraps `matrix`, returning `None` unless it equals its adjoint within
    /// 1e-12 elementwise.
    pub fn new(matrix: CMatrix) -> Option<Self> {
        if !matrix.is_square() {
            return None;
        }
        let skew = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        (skew <= HERMITIAN_TOL).then_some(Self(matrix))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }
}

/// `exp(-i θ J_x)` for a dimensionless precession phase `θ = Ω t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    theta: f64,
    matrix: CMatrix,
}

impl Propagator {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Largest elementwise deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        let prod = self.matrix.adjoint() * &self.matrix;
        (prod - CMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, state: &CVector) -> CVector {
        &self.matrix * state
    }
}

pub fn build_jz(sys: SpinSystem) -> HermitianOperator {
    let diag = CVector::from_iterator(sys.dim(), sys.magnetic_numbers().map(|m| C64::new(m, 0.0)));
    HermitianOperator(CMatrix::from_diagonal(&diag))
}

/// Ladder coefficients `<m+1|J_x|m> = sqrt(j(j+1) - m(m+1)) / 2` for
/// `m = -j, ..., j-1`.
pub fn jx_off_diagonal(sys: SpinSystem) -> Vec<f64> {
    let j = sys.j();
    (0..sys.dim() - 1)
        .map(|i| {
            // j(j+1) - m(m+1) = (j - m)(j + m + 1); the factored form is exact
            // for the integer/half-integer arithmetic involved.
            let m = sys.m_at(i);
            0.5 * ((j - m) * (j + m + 1.0)).sqrt()
        })
        .collect()
}

pub fn build_jx(sys: SpinSystem) -> HermitianOperator {
    let n = sys.dim();
    let off = jx_off_diagonal(sys);
    let mut out = CMatrix::zeros(n, n);
    for (i, &c) in off.iter().enumerate() {
        out[(i + 1, i)] = C64::new(c, 0.0);
        out[(i, i + 1)] = C64::new(c, 0.0);
    }
    HermitianOperator(out)
}

/// Eigenbasis of `J_x`, from which propagators for any phase are assembled.
///
/// The spectrum of `J_x` is exactly `{-j, ..., +j}`; the computed eigenvalues
/// are checked against it and the exact values are used for the phases.
#[derive(Debug, Clone)]
pub struct JxEigenbasis {
    sys: SpinSystem,
    vectors: DMatrix<f64>,
}

impl JxEigenbasis {
    pub fn new(sys: SpinSystem) -> Self {
        let off = jx_off_diagonal(sys);
        let diag = vec![0.0; sys.dim()];
        let SymTridiagEigen { values, vectors } =
            sym_tridiag_eigen(&diag, &off).expect("implicit QL converges on J_x");
        for (i, v) in values.iter().enumerate() {
            let exact = sys.m_at(i);
            assert!((v - exact).abs() <= 1e-8 * (1.0 + sys.j()), "J_x eigenvalue {v} deviates from {exact}");
        }
        Self { sys, vectors }
    }

    pub fn sys(&self) -> SpinSystem {
        self.sys
    }

    /// `V diag(exp(-i θ m)) Vᵀ`.
    pub fn propagator(&self, theta: f64) -> Propagator {
        let n = self.sys.dim();
        let phases: Vec<C64> =
            self.sys.magnetic_numbers().map(|m| C64::from_polar(1.0, -theta * m)).collect();
        let v = &self.vectors;
        // Scale the columns of V by the phases, then multiply by Vᵀ.
        let scaled = CMatrix::from_fn(n, n, |r, c| phases[c] * v[(r, c)]);
        let vt = v.transpose().map(|x| C64::new(x, 0.0));
        Propagator { theta, matrix: scaled * vt }
    }
}

pub fn rotation(sys: SpinSystem, theta: f64) -> Propagator {
    assert!(theta.is_finite(), "rotation phase must be finite");
    if theta == 0.0 {
        let n = sys.dim();
        return Propagator { theta, matrix: CMatrix::identity(n, n) };
    }
    JxEigenbasis::new(sys).propagator(theta)
}

/// `ln n!` via the log-gamma function.
pub fn ln_factorial(n: u32) -> f64 {
    ln_gamma(f64::from(n) + 1.0)
}

/// Natural log of `binom(n, k)`.
pub fn ln_binomial(n: u32, k: u32) -> f64 {
    debug_assert!(k <= n);
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `|<k| exp(-i (π/2) J_x) |-j>|² = binom(2j, j+k) / 4^j`, evaluated in log
/// space so that large `j` neither overflows nor underflows prematurely.
pub fn pi_half_transition_prob(sys: SpinSystem, k: f64) -> Result<f64> {
    let idx = sys.index_of(k).ok_or(Error::MagneticNumberOutOfRange { m: k, j: sys.j() })?;
    let two_j = sys.two_j();
    let ln_p = ln_binomial(two_j, idx as u32) - f64::from(two_j) * std::f64::consts::LN_2;
    Ok(ln_p.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn jz_spectra() {
        let jz = build_jz(SpinSystem::new(1));
        assert_eq!(jz.matrix()[(0, 0)].re, -0.5);
        assert_eq!(jz.matrix()[(1, 1)].re, 0.5);
        let jz = build_jz(SpinSystem::new(30));
        for i in 0..31 {
            assert_eq!(jz.matrix()[(i, i)].re, i as f64 - 15.0);
        }
    }

    #[test]
    fn jx_small_cases() {
        let jx = build_jx(SpinSystem::new(1));
        assert_eq!(jx.matrix()[(0, 1)].re, 0.5);
        assert_eq!(jx.matrix()[(1, 0)].re, 0.5);
        assert_eq!(jx.matrix()[(0, 0)].re, 0.0);
        let jx = build_jx(SpinSystem::new(2));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((jx.matrix()[(0, 1)].re - r).abs() < 1e-15);
        assert!((jx.matrix()[(1, 2)].re - r).abs() < 1e-15);
    }

    #[test]
    fn index_mapping() {
        let s = SpinSystem::new(3);
        assert_eq!(s.index_of(-1.5), Some(0));
        assert_eq!(s.index_of(1.5), Some(3));
        assert_eq!(s.index_of(2.5), None);
        assert_eq!(s.index_of(0.0), None);
        assert_eq!(SpinSystem::new(2).index_of(0.0), Some(1));
    }

    #[test]
    fn spin_half_quarter_turn_closed_form() {
        let u = rotation(SpinSystem::new(1), PI / 2.0);
        let c = (PI / 4.0).cos();
        let s = (PI / 4.0).sin();
        let expected = [[C64::new(c, 0.0), C64::new(0.0, -s)], [C64::new(0.0, -s), C64::new(c, 0.0)]];
        for (r, row) in expected.iter().enumerate() {
            for (col, want) in row.iter().enumerate() {
                assert!((u.matrix()[(r, col)] - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_phase_is_identity() {
        for two_j in [1, 4, 17] {
            let u = rotation(SpinSystem::new(two_j), 0.0);
            assert_eq!(u.matrix(), &CMatrix::identity(two_j as usize + 1, two_j as usize + 1));
        }
        // The eigenbasis route without the shortcut.
        let u = JxEigenbasis::new(SpinSystem::new(9)).propagator(0.0);
        assert!((u.matrix() - CMatrix::identity(10, 10)).camax() < 1e-12);
    }

    #[test]
    fn transition_prob_rejects_out_of_range() {
        let s = SpinSystem::new(2);
        assert!(pi_half_transition_prob(s, 2.0).is_err());
        assert!(pi_half_transition_prob(s, 0.5).is_err());
        assert!(pi_half_transition_prob(SpinSystem::new(1), 0.0).is_err());
    }

    #[test]
    fn transition_prob_small_values() {
        assert!((pi_half_transition_prob(SpinSystem::new(2), 0.0).unwrap() - 0.5).abs() < 1e-14);
        for k in [-0.5, 0.5] {
            assert!((pi_half_transition_prob(SpinSystem::new(1), k).unwrap() - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn hermitian_wrapper_rejects_skew() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(0.0, 1.0);
        assert!(HermitianOperator::new(m.clone()).is_none());
        m[(1, 0)] = C64::new(0.0, -1.0);
        assert!(HermitianOperator::new(m).is_some());
    }
}
