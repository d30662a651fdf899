//! The simulator against an independent dense density-matrix computation
//! built on a Taylor-series matrix exponential.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinmr::{MeasurementParams, Outcome, Pair, Simulator, SpinSystem};
use spinmr_oracle::Instrument;

const TOL: f64 = 1e-10;
const POINTS_PER_SPIN: usize = 25;

fn random_points(two_j: u32, rng: &mut ChaCha8Rng) -> Vec<MeasurementParams> {
    let j = f64::from(two_j) / 2.0;
    (0..POINTS_PER_SPIN)
        .map(|_| {
            let gamma = rng.random_range(0.0..=1.0 / j);
            let lambda = rng.random_range(0.0..=(1.0 - j * gamma).max(0.0));
            MeasurementParams::new(lambda, gamma)
        })
        .collect()
}

#[test]
fn functionals_match_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(20260101);
    for two_j in 1..=4 {
        let sim = Simulator::new(SpinSystem::new(two_j));
        for p in random_points(two_j, &mut rng) {
            let ours = sim.evaluate(p).unwrap();
            let theirs =
                spinmr_oracle::scores(two_j, Instrument::Unsharp { lambda: p.lambda, gamma: p.gamma });
            assert!((ours.k_lgi - theirs.k_lgi).abs() <= TOL, "two_j={two_j} {p:?}");
            assert!((ours.k_wlgi - theirs.k_wlgi).abs() <= TOL, "two_j={two_j} {p:?}");
            assert!((ours.k_nsit - theirs.k_nsit).abs() <= TOL, "two_j={two_j} {p:?}");
        }
    }
}

#[test]
fn joint_tables_match_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for two_j in [1, 2, 3, 4, 6] {
        let sim = Simulator::new(SpinSystem::new(two_j));
        for p in random_points(two_j, &mut rng).into_iter().take(5) {
            let inst = Instrument::Unsharp { lambda: p.lambda, gamma: p.gamma };
            for (pair, a, b) in [(Pair::T1T2, 0, 1), (Pair::T2T3, 1, 2), (Pair::T1T3, 0, 2)] {
                let ours = sim.joint(p, pair).unwrap();
                let theirs = spinmr_oracle::joint(two_j, inst, a, b);
                for (i, qa) in Outcome::BOTH.into_iter().enumerate() {
                    for (k, qb) in Outcome::BOTH.into_iter().enumerate() {
                        assert!((ours.get(qa, qb) - theirs[i][k]).abs() <= TOL, "two_j={two_j} {pair:?}");
                    }
                }
            }
        }
    }
}
