//! Brute-force reference simulator for the three-time measurement protocol.
//!
//! Everything here is deliberately naive: dense density matrices, a Taylor
//! scaling-and-squaring matrix exponential, and explicit enumeration of every
//! fine-grained outcome pair `(k, l)` before grouping. It shares no code with
//! the `spinmr` crate and exists only so tests have something independent to
//! compare against.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

pub type CMat = DMatrix<C64>;

const PI: f64 = std::f64::consts::PI;

/// Measurement phases (Ω·t) of the three measurement times.
pub const TIMES: [f64; 3] = [PI, 1.5 * PI, 2.0 * PI];

/// Dense `J_x` in the ascending-`m` basis.
pub fn jx_dense(two_j: u32) -> CMat {
    let d = two_j as usize + 1;
    let j = two_j as f64 / 2.0;
    let mut out = CMat::zeros(d, d);
    for i in 0..d - 1 {
        let m = i as f64 - j;
        let c = 0.5 * (j * (j + 1.0) - m * (m + 1.0)).sqrt();
        out[(i + 1, i)] = C64::new(c, 0.0);
        out[(i, i + 1)] = C64::new(c, 0.0);
    }
    out
}

fn one_norm(a: &CMat) -> f64 {
    (0..a.ncols()).map(|c| a.column(c).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = one_norm(a);
    let mut s = 0u32;
    while norm / 2f64.powi(s as i32) > 0.25 {
        s += 1;
    }
    let scaled = a / C64::new(2f64.powi(s as i32), 0.0);
    let mut term = CMat::identity(n, n);
    let mut sum = CMat::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / C64::new(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// `exp(-i θ J_x)`.
pub fn propagator(two_j: u32, theta: f64) -> CMat {
    let jx = jx_dense(two_j);
    expm(&(jx * C64::new(0.0, -theta)))
}

fn conj(u: &CMat, rho: &CMat) -> CMat {
    u * rho * u.adjoint()
}

fn trace_re(a: &CMat) -> f64 {
    a.trace().re
}

/// Effect operator for outcome index `k` (m = k - j) as a dense matrix.
pub fn effect(two_j: u32, lambda: f64, gamma: f64, k: usize) -> CMat {
    let d = two_j as usize + 1;
    let j = two_j as f64 / 2.0;
    let m = k as f64 - j;
    let mut f = CMat::identity(d, d) * C64::new((1.0 + m * gamma - lambda) / d as f64, 0.0);
    f[(k, k)] += C64::new(lambda, 0.0);
    f
}

fn diag_sqrt(f: &CMat) -> CMat {
    let d = f.nrows();
    let mut out = CMat::zeros(d, d);
    for i in 0..d {
        out[(i, i)] = C64::new(f[(i, i)].re.max(0.0).sqrt(), 0.0);
    }
    out
}

fn projector(d: usize, k: usize) -> CMat {
    let mut p = CMat::zeros(d, d);
    p[(k, k)] = C64::new(1.0, 0.0);
    p
}

fn initial_state(d: usize) -> CMat {
    projector(d, 0)
}

/// Kind of instrument used by the oracle.
#[derive(Debug, Clone, Copy)]
pub enum Instrument {
    /// Biased unsharp effects with square-root Kraus operators.
    Unsharp { lambda: f64, gamma: f64 },
    /// Plain projective `J_z` measurement.
    Projective,
}

struct Setup {
    d: usize,
    effects: Vec<CMat>,
    kraus: Vec<CMat>,
}

impl Setup {
    fn new(two_j: u32, inst: Instrument) -> Self {
        let d = two_j as usize + 1;
        let (effects, kraus) = match inst {
            Instrument::Unsharp { lambda, gamma } => {
                let eff: Vec<CMat> = (0..d).map(|k| effect(two_j, lambda, gamma, k)).collect();
                let kr = eff.iter().map(diag_sqrt).collect();
                (eff, kr)
            }
            Instrument::Projective => {
                let p: Vec<CMat> = (0..d).map(|k| projector(d, k)).collect();
                (p.clone(), p)
            }
        };
        Self { d, effects, kraus }
    }

    fn dichotomic(k: usize) -> usize {
        // index 0 -> Q = +1, index 1 -> Q = -1
        if k == 0 {
            1
        } else {
            0
        }
    }
}

/// Joint table indexed `[qa][qb]` with 0 meaning Q = +1 and 1 meaning Q = -1.
pub fn joint(two_j: u32, inst: Instrument, a: usize, b: usize) -> [[f64; 2]; 2] {
    let s = Setup::new(two_j, inst);
    let rho_a = conj(&propagator(two_j, TIMES[a]), &initial_state(s.d));
    let u_ab = propagator(two_j, TIMES[b] - TIMES[a]);
    let mut table = [[0.0; 2]; 2];
    for k in 0..s.d {
        let branch = conj(&u_ab, &(&s.kraus[k] * &rho_a * &s.kraus[k]));
        for l in 0..s.d {
            let p = trace_re(&(&s.effects[l] * &branch));
            table[Setup::dichotomic(k)][Setup::dichotomic(l)] += p;
        }
    }
    table
}

/// Single-time distribution `[P(+1), P(-1)]` without earlier measurements.
pub fn single(two_j: u32, inst: Instrument, t: usize) -> [f64; 2] {
    let s = Setup::new(two_j, inst);
    let rho = conj(&propagator(two_j, TIMES[t]), &initial_state(s.d));
    let mut out = [0.0; 2];
    for k in 0..s.d {
        out[Setup::dichotomic(k)] += trace_re(&(&s.effects[k] * &rho));
    }
    out
}

fn correlator(t: &[[f64; 2]; 2]) -> f64 {
    t[0][0] + t[1][1] - t[0][1] - t[1][0]
}

#[derive(Debug, Clone, Copy)]
pub struct OracleScores {
    pub k_lgi: f64,
    pub k_wlgi: f64,
    pub k_nsit: f64,
}

/// The three macrorealism functionals, each built from independent run-sets.
pub fn scores(two_j: u32, inst: Instrument) -> OracleScores {
    let p12 = joint(two_j, inst, 0, 1);
    let p23 = joint(two_j, inst, 1, 2);
    let p13 = joint(two_j, inst, 0, 2);
    let p3 = single(two_j, inst, 2);
    OracleScores {
        k_lgi: correlator(&p12) + correlator(&p23) - correlator(&p13),
        k_wlgi: p23[0][0] - p12[1][0] - p13[0][0],
        k_nsit: p3[1] - (p23[0][1] + p23[1][1]),
    }
}
