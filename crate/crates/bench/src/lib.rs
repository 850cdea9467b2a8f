//! Benchmark fixtures shared by the criterion targets.

use dpcount_core::BoundaryCase;

/// Bounds at which both counting methods finish in well under a second.
pub const SMALL_BOUNDS: [i64; 3] = [100, 1000, 3000];

/// Cases in benchmark order, named for report labels.
pub fn labelled_cases() -> Vec<(String, BoundaryCase)> {
    BoundaryCase::ALL.iter().map(|&c| (format!("case{c}"), c)).collect()
}
