//! Weighted generalized shift operators on finite-dimensional `l2` spaces.
//!
//! An operator `σ(φ, w)` on `l2({0..n-1})` maps `x` to `(w[α] x[φ(α)])_α`.
//! This crate computes its adjoint as an explicit finite sum of operators of
//! the same kind, classifies it (norm, self-adjointness, invertibility,
//! unitarity) directly from `φ` and `w`, explores when the additive semigroup
//! generated by such operators is closed under adjoints, and checks all of it
//! against a dense-matrix oracle.

pub mod adjoint;
pub mod analysis;
pub mod error;
pub mod io;
pub mod model;
pub mod oracle;
pub mod semigroup;
pub mod tolerance;
pub mod verify;

pub use adjoint::{
    adjoint_decompose, adjoint_of_sum, build_fibers, min_term_count, term_bound_from_separation,
    DecompositionResult, FiberTable,
};
pub use analysis::{
    classify, fiber_norm, is_invertible, is_isometry, is_self_adjoint, is_unitary,
    max_fiber_cardinality, ClassificationReport,
};
pub use error::{Error, Result};
pub use model::{
    apply, apply_sum, basis_vector, inner_product, IndexMap, L2Vector, Scalar, SumOperator,
    WeightVector, WgsOperator,
};
pub use oracle::{DenseMatrix, OracleConfig};
pub use semigroup::{
    check_closure, counterexample_operator, is_conjugate_invariant, predict_adjoint_invariance,
    run_truncation_study, zero_is_limit_point, ClosureReport, NullSequenceRule, TruncationStudy,
    WeightAlphabet,
};
pub use tolerance::Tolerance;
