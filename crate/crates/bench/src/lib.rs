//! Benchmark fixtures for `wgshift-core`.

use wgshift_core::oracle::random_operator;
use wgshift_core::{IndexMap, Scalar, WeightVector, WgsOperator};

/// Random operator with 30% zero weights.
pub fn random_fixture(n: usize) -> WgsOperator {
    random_operator(n, 0xbe_5c, 0.3).expect("n >= 1")
}

/// Constant map with all weights nonzero: a single fiber of size `n`, the
/// worst case for the adjoint term count.
pub fn collapsing_fixture(n: usize) -> WgsOperator {
    let weights = (0..n)
        .map(|k| Scalar::new(1.0 / (k + 1) as f64, 0.0))
        .collect();
    WgsOperator::new(
        IndexMap::constant(n, 0).expect("n >= 1"),
        WeightVector::new(weights).expect("finite"),
    )
    .expect("dimensions agree")
}
