//! Structural classification of weighted generalized shifts.
//!
//! None of these predicates materialize a matrix; each works directly on
//! `φ` and `w` in `O(n)`.

use serde::{Deserialize, Serialize};

use crate::model::{IndexMap, WgsOperator};
use crate::tolerance::Tolerance;

/// `Σ_{α ∈ φ⁻¹(β)} |w[α]|²` for every β.
pub fn fiber_mass(op: &WgsOperator) -> Vec<f64> {
    let mut mass = vec![0.0; op.n()];
    for (alpha, w) in op.weights().entries().iter().enumerate() {
        mass[op.phi().get(alpha)] += w.norm_sqr();
    }
    mass
}

/// Operator norm: `max_β (Σ_{α ∈ φ⁻¹(β)} |w[α]|²)^{1/2}`.
pub fn fiber_norm(op: &WgsOperator) -> f64 {
    fiber_mass(op).into_iter().fold(0.0, f64::max).sqrt()
}

/// `max_β |φ⁻¹(β)|`.
pub fn max_fiber_cardinality(phi: &IndexMap) -> usize {
    phi.fiber_sizes().into_iter().max().unwrap_or(0)
}

/// Self-adjointness: for every θ, `w[θ] = 0` when `φ(φ(θ)) ≠ θ`, and
/// `w[θ] = conj(w[φ(θ)])` when `φ(φ(θ)) = θ`.
pub fn is_self_adjoint_with(op: &WgsOperator, tol: &Tolerance) -> bool {
    let phi = op.phi();
    let w = op.weights();
    (0..op.n()).all(|theta| {
        let image = phi.get(theta);
        if phi.get(image) == theta {
            tol.eq(w.get(theta), w.get(image).conj())
        } else {
            tol.is_zero(w.get(theta))
        }
    })
}

pub fn is_self_adjoint(op: &WgsOperator) -> bool {
    is_self_adjoint_with(op, &Tolerance::default())
}

/// Bijective `φ` and no zero weight.
pub fn is_invertible(op: &WgsOperator) -> bool {
    op.phi().is_bijective() && op.weights().entries().iter().all(|z| z.norm() > 0.0)
}

/// `sup_α (|w[α]| + 1/|w[α]|)`, defined when every weight is nonzero.
pub fn invertibility_bound(op: &WgsOperator) -> Option<f64> {
    let entries = op.weights().entries();
    if entries.iter().any(|z| z.norm() == 0.0) {
        return None;
    }
    Some(
        entries
            .iter()
            .map(|z| z.norm() + 1.0 / z.norm())
            .fold(0.0, f64::max),
    )
}

/// Same quantity over the nonzero weights only; `None` for the zero operator.
pub fn nonzero_invertibility_bound(op: &WgsOperator) -> Option<f64> {
    op.weights()
        .entries()
        .iter()
        .map(|z| z.norm())
        .filter(|&r| r > 0.0)
        .map(|r| r + 1.0 / r)
        .reduce(f64::max)
}

/// `‖Tx‖ = ‖x‖` for all x, i.e. `TᴴT = I`, i.e. every fiber mass equals 1.
pub fn is_isometry_with(op: &WgsOperator, tol: &Tolerance) -> bool {
    fiber_mass(op).into_iter().all(|m| tol.eq_real(m, 1.0))
}

pub fn is_isometry(op: &WgsOperator) -> bool {
    is_isometry_with(op, &Tolerance::default())
}

/// Bijective `φ` and `|w[α]| = 1` for every α.
pub fn is_unitary_with(op: &WgsOperator, tol: &Tolerance) -> bool {
    op.phi().is_bijective()
        && op
            .weights()
            .entries()
            .iter()
            .all(|z| tol.eq_real(z.norm(), 1.0))
}

pub fn is_unitary(op: &WgsOperator) -> bool {
    is_unitary_with(op, &Tolerance::default())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub norm: f64,
    pub max_fiber_cardinality: usize,
    pub is_self_adjoint: bool,
    pub is_invertible: bool,
    pub is_isometry: bool,
    pub is_unitary: bool,
    pub invertibility_bound: Option<f64>,
}

pub fn classify_with(op: &WgsOperator, tol: &Tolerance) -> ClassificationReport {
    ClassificationReport {
        norm: fiber_norm(op),
        max_fiber_cardinality: max_fiber_cardinality(op.phi()),
        is_self_adjoint: is_self_adjoint_with(op, tol),
        is_invertible: is_invertible(op),
        is_isometry: is_isometry_with(op, tol),
        is_unitary: is_unitary_with(op, tol),
        invertibility_bound: invertibility_bound(op),
    }
}

pub fn classify(op: &WgsOperator) -> ClassificationReport {
    classify_with(op, &Tolerance::default())
}
