//! Sequential biased unsharp measurements on a precessing spin-j and the
//! macrorealism tests built on them: the Leggett-Garg inequality (LGI), its
//! Wigner form (WLGI) and no-signalling in time (NSIT).
//!
//! Module map:
//!
//! * [`spin`]: `J_z`, `J_x`, precession propagators and `π/2` transition
//!   probabilities.
//! * [`povm`]: the biased unsharp effect family and its admissible region.
//! * [`protocol`]: the three-time protocol simulator and the three
//!   functionals. This is the ground truth for everything else.
//! * [`closed_form`]: published closed-form expressions, evaluated as
//!   typeset for cross-validation against the simulator.
//! * [`analysis`]: threshold sharpness search, sweeps and table reproduction.
//! * [`format`]: frozen CSV output schema.

pub mod analysis;
pub mod closed_form;
pub mod error;
pub mod format;
pub mod povm;
pub mod protocol;
pub mod spin;
pub mod tridiag;

pub use error::{Error, Result};
pub use povm::{build_effects, validate_params, BiasedUnsharpPovm, Constraint, MeasurementParams};
pub use protocol::{
    evaluate_mr, joint_distribution, single_time_distribution, JointProbabilityTable, MrScores, Outcome,
    Pair, ProtocolSpec, Simulator, Time,
};
pub use spin::{build_jx, build_jz, pi_half_transition_prob, rotation, Propagator, SpinSystem};
