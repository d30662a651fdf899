use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use spinmr::spin::{build_jx, CMatrix, JxEigenbasis};
use spinmr::tridiag::sym_tridiag_eigen;
use spinmr::{
    build_effects, pi_half_transition_prob, rotation, validate_params, MeasurementParams, Outcome, Pair,
    Simulator, SpinSystem, Time,
};
use spinmr_oracle::Instrument;

/// `(two_j, λ, γ)` uniformly inside the admissible region, boundaries included.
fn admissible(max_two_j: u32) -> impl Strategy<Value = (u32, f64, f64)> {
    (1..=max_two_j, 0.0..=1.0f64, 0.0..=1.0f64, 0u8..4).prop_map(|(two_j, u, v, edge)| {
        let j = f64::from(two_j) / 2.0;
        let gamma = match edge {
            1 => 0.0,
            2 => 1.0 / j,
            _ => u / j,
        };
        let top = (1.0 - j * gamma).max(0.0);
        let lambda = if edge == 3 { top } else { v * top };
        (two_j, lambda, gamma)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn povm_complete_and_positive((two_j, lambda, gamma) in admissible(60)) {
        let sys = SpinSystem::new(two_j);
        let povm = build_effects(sys, MeasurementParams::new(lambda, gamma)).unwrap();
        for x in povm.completeness_diagonal() {
            prop_assert!((x - 1.0).abs() <= 1e-12, "Σ F = {x}");
        }
        prop_assert!(povm.min_diagonal_entry() >= 0.0);
        for e in povm.effects() {
            for (s, f) in e.sqrt_diagonal.iter().zip(&e.diagonal) {
                prop_assert!((s * s - f).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn unbiased_effects_are_mirror_symmetric((two_j, lambda, _g) in admissible(40)) {
        let sys = SpinSystem::new(two_j);
        let povm = build_effects(sys, MeasurementParams::new(lambda, 0.0)).unwrap();
        let d = sys.dim();
        for k in 0..d {
            let (a, b) = (&povm.effect(k).diagonal, &povm.effect(d - 1 - k).diagonal);
            for i in 0..d {
                prop_assert!((a[i] - b[d - 1 - i]).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn joint_tables_normalized_and_consistent((two_j, lambda, gamma) in admissible(12)) {
        let sim = Simulator::new(SpinSystem::new(two_j));
        let params = MeasurementParams::new(lambda, gamma);
        for pair in Pair::ALL {
            let table = sim.joint(params, pair).unwrap();
            prop_assert!((table.total() - 1.0).abs() <= 1e-10);
            for q in Outcome::BOTH {
                for r in Outcome::BOTH {
                    prop_assert!(table.get(q, r) >= -1e-10);
                }
            }
            // The first measurement cannot depend on the later one.
            let single = sim.single_time(params, pair.times().0).unwrap();
            let marginal = table.first_marginal();
            prop_assert!((marginal.plus - single.plus).abs() <= 1e-10);
            prop_assert!((marginal.minus - single.minus).abs() <= 1e-10);
        }
    }

    #[test]
    fn zero_sharpness_is_noninvasive((two_j, _l, gamma) in admissible(40)) {
        let scores = Simulator::new(SpinSystem::new(two_j)).evaluate(MeasurementParams::new(0.0, gamma)).unwrap();
        prop_assert!(scores.k_nsit.abs() <= 1e-10, "k_nsit = {}", scores.k_nsit);
        prop_assert!(scores.lgi_violation <= 1e-10);
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn propagators_are_unitary() {
    for two_j in [1, 2, 3, 10, 30, 40, 50, 100, 200] {
        let basis = JxEigenbasis::new(SpinSystem::new(two_j));
        for theta in [PI / 2.0, PI, 1.5 * PI, 2.0 * PI] {
            let u = basis.propagator(theta);
            assert!(u.unitarity_defect() <= 1e-10, "two_j={two_j} θ={theta}: {}", u.unitarity_defect());
        }
    }
}

#[test]
fn propagators_compose() {
    for two_j in [1, 4, 7, 30, 50] {
        let sys = SpinSystem::new(two_j);
        for (a, b) in [(PI, PI / 2.0), (0.3, 1.1), (PI / 2.0, PI / 2.0)] {
            let lhs = rotation(sys, a + b);
            let rhs = rotation(sys, a).matrix() * rotation(sys, b).matrix();
            assert!(max_abs(&(lhs.matrix() - rhs)) <= 1e-9, "two_j={two_j}");
        }
    }
}

#[test]
fn full_turn_is_plus_or_minus_identity() {
    for two_j in [1, 2, 3, 4, 15, 30, 51] {
        let sys = SpinSystem::new(two_j);
        let n = sys.dim();
        let sign = if two_j % 2 == 0 { 1.0 } else { -1.0 };
        let target = CMatrix::identity(n, n) * C64::new(sign, 0.0);
        assert!(max_abs(&(rotation(sys, 2.0 * PI).matrix() - target)) <= 1e-9, "two_j={two_j}");
    }
}

#[test]
fn jx_spectrum_is_magnetic_ladder() {
    for two_j in [1, 2, 5, 30, 101] {
        let sys = SpinSystem::new(two_j);
        let jx = build_jx(sys);
        let diag = vec![0.0; sys.dim()];
        let off: Vec<f64> = (0..sys.dim() - 1).map(|i| jx.matrix()[(i + 1, i)].re).collect();
        let eig = sym_tridiag_eigen(&diag, &off).unwrap();
        for (i, v) in eig.values.iter().enumerate() {
            assert!((v - sys.m_at(i)).abs() <= 1e-9, "two_j={two_j}");
        }
    }
}

#[test]
fn half_turn_flips_spin_one() {
    let u = rotation(SpinSystem::new(2), PI);
    // |<+1| U |-1>| = 1.
    assert!((u.matrix()[(2, 0)].norm() - 1.0).abs() <= 1e-12);
    assert!(u.matrix()[(0, 0)].norm() <= 1e-12);
}

#[test]
fn quarter_turn_probabilities_log_space_vs_matrix() {
    for two_j in 1..=60u32 {
        let sys = SpinSystem::new(two_j);
        let u = rotation(sys, PI / 2.0);
        let mut total = 0.0;
        for (idx, m) in sys.magnetic_numbers().enumerate() {
            let p = pi_half_transition_prob(sys, m).unwrap();
            assert!((p - u.matrix()[(idx, 0)].norm_sqr()).abs() <= 1e-10, "two_j={two_j} m={m}");
            total += p;
        }
        assert!((total - 1.0).abs() <= 1e-12);
    }
    for two_j in [200, 400] {
        let sys = SpinSystem::new(two_j);
        let total: f64 = sys.magnetic_numbers().map(|m| pi_half_transition_prob(sys, m).unwrap()).sum();
        assert!(total.is_finite() && (total - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn sharp_limit_matches_projective_measurement() {
    for two_j in 1..=6 {
        let ours = Simulator::new(SpinSystem::new(two_j)).evaluate(MeasurementParams::sharp()).unwrap();
        let proj = spinmr_oracle::scores(two_j, Instrument::Projective);
        assert!((ours.k_lgi - proj.k_lgi).abs() <= 1e-10, "two_j={two_j}");
        assert!((ours.k_wlgi - proj.k_wlgi).abs() <= 1e-10, "two_j={two_j}");
        assert!((ours.k_nsit - proj.k_nsit).abs() <= 1e-10, "two_j={two_j}");
    }
}

#[test]
fn spin_half_sharp_lgi_sits_on_bound() {
    let s = Simulator::new(SpinSystem::new(1)).evaluate(MeasurementParams::sharp()).unwrap();
    assert!((s.k_lgi - 1.0).abs() <= 1e-10, "{}", s.k_lgi);
}

#[test]
fn violations_grow_with_bias_on_table_grids() {
    let grids: [(u32, [f64; 3]); 3] =
        [(30, [0.0, 0.017, 0.033]), (40, [0.0, 0.012, 0.025]), (50, [0.0, 0.010, 0.020])];
    for (two_j, gammas) in grids {
        let sim = Simulator::new(SpinSystem::new(two_j));
        let s: Vec<_> =
            gammas.iter().map(|&g| sim.evaluate(MeasurementParams::new(0.5, g)).unwrap()).collect();
        for w in s.windows(2) {
            assert!(w[1].lgi_violation >= w[0].lgi_violation);
            assert!(w[1].k_wlgi >= w[0].k_wlgi);
            assert!(w[1].k_nsit.abs() >= w[0].k_nsit.abs());
        }
    }
}

#[test]
fn unmeasured_precession_returns_to_start_at_third_time() {
    let sim = Simulator::new(SpinSystem::new(30));
    let p = sim.single_time(MeasurementParams::new(0.5, 0.0), Time::T3).unwrap();
    // 16/31 from an independent rational computation.
    assert!((p.minus - 0.5161290322580645).abs() <= 1e-12, "{}", p.minus);
}

#[test]
fn boundary_parameters_are_accepted() {
    let sys = SpinSystem::new(30);
    assert!(validate_params(sys, MeasurementParams::new(0.0, 1.0 / 15.0)).is_valid());
    assert!(validate_params(sys, MeasurementParams::new(0.25, 0.05)).is_valid());
    assert!(!validate_params(sys, MeasurementParams::new(0.25 + 1e-9, 0.05)).is_valid());
}
