//! Benchmark-only crate; see `benches/engines.rs`. The library target exists
//! so the package builds under plain `cargo build` and carries the shared
//! parameter presets.

use cascade_core::model::{ModelParams, TrueValue};

/// The parameter point used throughout the benchmarks: one threshold below
/// 1/eta, moderate fake fraction, fast absorption.
pub fn reference_point() -> ModelParams {
    ModelParams::new(0.7, 0.2, TrueValue::Bad).expect("valid reference point")
}

/// A slow-absorption corner: eta near 0.05, so stage counts around 19 and
/// walks that keep the undecided band occupied for hundreds of steps.
pub fn slow_corner() -> ModelParams {
    ModelParams::new(0.51, 0.9, TrueValue::Bad).expect("valid corner point")
}
