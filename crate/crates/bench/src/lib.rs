//! Fixtures shared by the benchmarks.

use lapbc_core::graph::{build_family, combinatorial_ball, GraphGenerator};
use lapbc_core::truncation::{truncate, BoundaryCondition, TruncatedOperator};

/// Truncation of a built-in family to the ball of radius `r` about its root.
pub fn ball_operator(descriptor: &str, r: usize, bc: BoundaryCondition) -> TruncatedOperator {
    let g = build_family(descriptor).expect("known family");
    let ball = combinatorial_ball(&g, &g.root(), r);
    truncate(&g, &ball, bc).expect("finite ball")
}

/// Deterministic non-negative test vector.
pub fn probe(n: usize) -> Vec<f64> {
    (0..n).map(|i| ((i * 7919) % 13) as f64 / 13.0).collect()
}
