//! Dense-oracle verification suite for a single operator.
//!
//! Each check yields a residual and a tolerance; a check passes iff the
//! residual does not exceed the tolerance. Boolean agreements use residual 0
//! (agree) or 1 (disagree).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::adjoint::adjoint_decompose;
use crate::analysis::{classify_with, fiber_norm, is_self_adjoint_with, is_unitary_with};
use crate::error::{check_dim, Result};
use crate::model::{SumOperator, WgsOperator};
use crate::oracle::{
    conjugate_transpose, hermitian_test, random_vector, spectral_norm, to_dense, to_dense_terms,
    unitary_test, OracleConfig,
};
use crate::tolerance::Tolerance;

pub const ADJOINT_TOL: f64 = 1e-9;
pub const NORM_RTOL: f64 = 1e-6;
pub const PREDICATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    pub oracle: OracleConfig,
    pub tolerance: Tolerance,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 20,
            seed: 0,
            oracle: OracleConfig::default(),
            tolerance: Tolerance::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(name: &'static str, max_residual: f64, tolerance: f64) -> Self {
        CheckResult {
            name,
            max_residual,
            tolerance,
            // NaN residuals fail.
            passed: max_residual <= tolerance,
        }
    }

    fn agreement(name: &'static str, agree: bool) -> Self {
        CheckResult::new(name, if agree { 0.0 } else { 1.0 }, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub term_count: usize,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: Tolerance,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Verifies the engine's own decomposition of `op`.
pub fn verify_operator(op: &WgsOperator, opts: &VerifyOptions) -> Result<VerifyReport> {
    let terms = adjoint_decompose(op).into_terms();
    verify_decomposition(op, &terms, opts)
}

/// Verifies that `terms` sum to the adjoint of `op`, plus the structural
/// norm and predicate claims about `op`.
pub fn verify_decomposition(
    op: &WgsOperator,
    terms: &[WgsOperator],
    opts: &VerifyOptions,
) -> Result<VerifyReport> {
    let n = op.n();
    opts.oracle.check(n)?;
    for t in terms {
        check_dim(n, t.n())?;
    }
    let dense = to_dense(op);
    let mut checks = Vec::new();

    let adjoint_dense = conjugate_transpose(&dense);
    let summed = to_dense_terms(n, terms)?;
    checks.push(CheckResult::new(
        "oracle_equality",
        summed.max_abs_diff(&adjoint_dense)?,
        ADJOINT_TOL,
    ));

    let adjoint = if terms.is_empty() {
        SumOperator::single(WgsOperator::zero(n)?)
    } else {
        SumOperator::new(terms.to_vec())?
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst = 0.0f64;
    for _ in 0..opts.trials {
        let x = random_vector(&mut rng, n)?;
        let y = random_vector(&mut rng, n)?;
        let lhs = op.apply(&x)?.inner(&y)?;
        let rhs = x.inner(&adjoint.apply(&y)?)?;
        let r = (lhs - rhs).norm() / (1.0 + x.norm() * y.norm());
        worst = if r.is_nan() { f64::NAN } else { worst.max(r) };
    }
    checks.push(CheckResult::new("adjoint_identity", worst, ADJOINT_TOL));

    let spectral = spectral_norm(&dense, opts.oracle.max_iters, opts.oracle.power_tol);
    let structural = fiber_norm(op);
    let norm_residual = if !spectral.converged {
        f64::INFINITY
    } else if spectral.value == 0.0 {
        structural
    } else {
        (structural - spectral.value).abs() / spectral.value
    };
    checks.push(CheckResult::new("norm_agreement", norm_residual, NORM_RTOL));

    checks.push(CheckResult::agreement(
        "self_adjoint_agreement",
        is_self_adjoint_with(op, &opts.tolerance) == hermitian_test(&dense, PREDICATE_TOL),
    ));
    checks.push(CheckResult::agreement(
        "unitary_agreement",
        is_unitary_with(op, &opts.tolerance) == unitary_test(&dense, PREDICATE_TOL),
    ));

    let report = classify_with(op, &opts.tolerance);
    let consistent = (!report.is_unitary || (report.is_isometry && report.is_invertible))
        && (!report.is_isometry || opts.tolerance.eq_real(report.norm, 1.0))
        && (report.is_invertible
            == (op.phi().is_injective() && op.weights().entries().iter().all(|z| z.norm() > 0.0)));
    checks.push(CheckResult::agreement(
        "classification_consistency",
        consistent,
    ));

    Ok(VerifyReport {
        n,
        term_count: terms.len(),
        trials: opts.trials,
        seed: opts.seed,
        tolerance: opts.tolerance,
        checks,
    })
}
