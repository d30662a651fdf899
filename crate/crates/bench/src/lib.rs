//! Shared fixtures for the criterion benches in `benches/`.

use spinmr::{MeasurementParams, SpinSystem};

/// Spins benchmarked by default; `two_j = 400` is the largest supported size.
pub const SPINS: [u32; 5] = [10, 30, 50, 100, 400];

/// A mid-range admissible point for `sys`.
pub fn typical_params(sys: SpinSystem) -> MeasurementParams {
    let gamma = 0.5 / sys.j();
    MeasurementParams::new(0.5 * (1.0 - sys.j() * gamma), gamma)
}
