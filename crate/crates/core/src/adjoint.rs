//! Adjoint of a weighted generalized shift as a finite family of weighted
//! generalized shifts.
//!
//! For `T = σ(φ, w)` the adjoint satisfies
//! `(T* y)[β] = Σ_{α ∈ φ⁻¹(β)} conj(w[α]) y[α]`. Enumerate the nonzero part of
//! each fiber, `C_β = {α ∈ φ⁻¹(β) : w[α] ≠ 0}`, in ascending order as
//! `α_β^1, α_β^2, ...`. Term `i` then reads coordinate `α_β^i` with weight
//! `conj(w[α_β^i])` at every `β` with `|C_β| >= i`, and is parked on the anchor
//! `ψ` with weight zero elsewhere. Summing the terms gives `T*` exactly.

use crate::analysis::fiber_norm;
use crate::error::{Error, Result};
use crate::model::{IndexMap, L2Vector, Scalar, SumOperator, WeightVector, WgsOperator};

/// Anchor index used for padded positions.
pub const ANCHOR: usize = 0;

/// Fibers `φ⁻¹(β)` and their nonzero-weight parts `C_β`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberTable {
    fibers: Vec<Vec<usize>>,
    nonzero_fibers: Vec<Vec<usize>>,
}

impl FiberTable {
    pub fn n(&self) -> usize {
        self.fibers.len()
    }

    pub fn fiber(&self, beta: usize) -> &[usize] {
        &self.fibers[beta]
    }

    pub fn nonzero_fiber(&self, beta: usize) -> &[usize] {
        &self.nonzero_fibers[beta]
    }

    pub fn fibers(&self) -> &[Vec<usize>] {
        &self.fibers
    }

    pub fn nonzero_fibers(&self) -> &[Vec<usize>] {
        &self.nonzero_fibers
    }

    /// `|C_β|` for every β.
    pub fn nonzero_counts(&self) -> Vec<usize> {
        self.nonzero_fibers.iter().map(Vec::len).collect()
    }
}

pub fn build_fibers(op: &WgsOperator) -> FiberTable {
    let n = op.n();
    let mut fibers = vec![Vec::new(); n];
    let mut nonzero_fibers = vec![Vec::new(); n];
    // Ascending α gives ascending fibers for free.
    for alpha in 0..n {
        let beta = op.phi().get(alpha);
        fibers[beta].push(alpha);
        if op.weights().get(alpha) != Scalar::new(0.0, 0.0) {
            nonzero_fibers[beta].push(alpha);
        }
    }
    FiberTable {
        fibers,
        nonzero_fibers,
    }
}

/// The adjoint as an ordered list of weighted generalized shifts.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    n: usize,
    terms: Vec<WgsOperator>,
    psi: usize,
    fiber_counts: Vec<usize>,
    source_norm: f64,
}

impl DecompositionResult {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Term `i` (0-based) holds `η_{i+1}` and `u_{i+1}`.
    pub fn terms(&self) -> &[WgsOperator] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<WgsOperator> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn psi(&self) -> usize {
        self.psi
    }

    /// `|C_β|` per β; these decide where weights are nonzero.
    pub fn fiber_counts(&self) -> &[usize] {
        &self.fiber_counts
    }

    /// The bookkeeping count `m_β = |C_β| + 1` (one past the last live term).
    pub fn padded_counts(&self) -> Vec<usize> {
        self.fiber_counts.iter().map(|c| c + 1).collect()
    }

    /// `M`, the norm of the source operator.
    pub fn source_norm(&self) -> f64 {
        self.source_norm
    }

    /// The terms as a sum; the zero operator when there are none.
    pub fn as_sum(&self) -> SumOperator {
        if self.terms.is_empty() {
            SumOperator::single(WgsOperator::zero(self.n).expect("n >= 1"))
        } else {
            SumOperator::new(self.terms.clone()).expect("terms share one dimension")
        }
    }

    /// `T* y`.
    pub fn apply(&self, y: &L2Vector) -> Result<L2Vector> {
        self.as_sum().apply(y)
    }
}

pub fn adjoint_decompose(op: &WgsOperator) -> DecompositionResult {
    let n = op.n();
    let table = build_fibers(op);
    let fiber_counts = table.nonzero_counts();
    let count = fiber_counts.iter().copied().max().unwrap_or(0);
    let zero = Scalar::new(0.0, 0.0);

    let terms = (0..count)
        .map(|i| {
            let mut image = vec![ANCHOR; n];
            let mut weights = vec![zero; n];
            for (beta, c_beta) in table.nonzero_fibers.iter().enumerate() {
                if let Some(&alpha) = c_beta.get(i) {
                    image[beta] = alpha;
                    let u = op.weights().get(alpha).conj();
                    // Adding +0.0 clears signed zeros and changes nothing else.
                    weights[beta] = Scalar::new(u.re + 0.0, u.im + 0.0);
                }
            }
            WgsOperator::new(
                IndexMap::new(image).expect("fiber members are in range"),
                WeightVector::new(weights).expect("conjugates of finite weights"),
            )
            .expect("dimensions agree")
        })
        .collect();

    DecompositionResult {
        n,
        terms,
        psi: ANCHOR,
        fiber_counts,
        source_norm: fiber_norm(op),
    }
}

/// `max_β |C_β|`: the number of terms the adjoint needs.
pub fn min_term_count(op: &WgsOperator) -> usize {
    build_fibers(op)
        .nonzero_fibers
        .iter()
        .map(Vec::len)
        .max()
        .unwrap_or(0)
}

/// `floor(M²/δ²) + 2`, a strict upper bound on the term count of any operator
/// with norm at most `M` whose nonzero weights all have modulus `>= δ`.
pub fn term_bound_from_separation(norm_bound: f64, delta: f64) -> Result<usize> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Domain(format!(
            "delta must be positive, got {delta}"
        )));
    }
    if !(norm_bound.is_finite() && norm_bound >= 0.0) {
        return Err(Error::Domain(format!(
            "norm bound must be finite and nonnegative, got {norm_bound}"
        )));
    }
    let ratio = (norm_bound / delta).powi(2).floor();
    if ratio >= (usize::MAX - 2) as f64 {
        return Err(Error::Domain(format!(
            "bound (M/delta)^2 = {ratio} does not fit in an integer"
        )));
    }
    Ok(ratio as usize + 2)
}

/// `(T_1 + ... + T_m)* = T_1* + ... + T_m*`, concatenated in term order.
pub fn adjoint_of_sum(s: &SumOperator) -> Vec<WgsOperator> {
    s.terms()
        .iter()
        .flat_map(|t| adjoint_decompose(t).into_terms())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{conjugate_transpose, random_operator, to_dense, to_dense_terms};

    fn c(re: f64, im: f64) -> Scalar {
        Scalar::new(re, im)
    }

    fn reals(v: &[f64]) -> Vec<Scalar> {
        v.iter().map(|&x| c(x, 0.)).collect()
    }

    #[test]
    fn fibers_of_constant_map() {
        let op = WgsOperator::from_parts(vec![0; 4], reals(&[1., 2., 3., 4.])).unwrap();
        let t = build_fibers(&op);
        assert_eq!(t.fiber(0), &[0, 1, 2, 3]);
        assert!((1..4).all(|b| t.fiber(b).is_empty()));
        assert_eq!(t.nonzero_fiber(0), &[0, 1, 2, 3]);

        let op = WgsOperator::from_parts(vec![0; 4], reals(&[1., 0., 3., 0.])).unwrap();
        assert_eq!(build_fibers(&op).nonzero_fiber(0), &[0, 2]);
    }

    #[test]
    fn fibers_of_identity() {
        let t = build_fibers(&WgsOperator::identity(3).unwrap());
        for b in 0..3 {
            assert_eq!(t.fiber(b), &[b]);
        }
    }

    #[test]
    fn decompose_constant_map() {
        let op = WgsOperator::from_parts(vec![0, 0, 0], reals(&[1., 2., 3.])).unwrap();
        let d = adjoint_decompose(&op);
        let expected = [
            (vec![0, 0, 0], reals(&[1., 0., 0.])),
            (vec![1, 0, 0], reals(&[2., 0., 0.])),
            (vec![2, 0, 0], reals(&[3., 0., 0.])),
        ];
        assert_eq!(d.len(), 3);
        for (term, (image, w)) in d.terms().iter().zip(expected) {
            assert_eq!(term.phi().image(), &image[..]);
            assert_eq!(term.weights().entries(), &w[..]);
        }
        let sum = to_dense_terms(3, d.terms()).unwrap();
        assert_eq!(sum.row(0), &reals(&[1., 2., 3.])[..]);
        assert_eq!(sum.row(1), &reals(&[0., 0., 0.])[..]);
        assert_eq!(sum, conjugate_transpose(&to_dense(&op)));
        assert_eq!(d.psi(), 0);
        assert_eq!(d.fiber_counts(), &[3, 0, 0]);
        assert_eq!(d.padded_counts(), vec![4, 1, 1]);
    }

    #[test]
    fn decompose_identity_is_itself() {
        let id = WgsOperator::identity(3).unwrap();
        let d = adjoint_decompose(&id);
        assert_eq!(d.terms(), &[id]);
    }

    #[test]
    fn decompose_weighted_swap() {
        let op = WgsOperator::from_parts(vec![1, 0], vec![c(0., 1.), c(2., 0.)]).unwrap();
        let d = adjoint_decompose(&op);
        assert_eq!(d.len(), 1);
        let t = &d.terms()[0];
        assert_eq!(t.phi().image(), &[1, 0]);
        assert_eq!(t.weights().entries(), &[c(2., -0.), c(0., -1.)]);
        assert_eq!(
            to_dense_terms(2, d.terms()).unwrap(),
            conjugate_transpose(&to_dense(&op))
        );
    }

    #[test]
    fn zero_operator_has_no_terms() {
        let op = WgsOperator::from_parts(vec![2, 2, 0], reals(&[0., 0., 0.])).unwrap();
        let d = adjoint_decompose(&op);
        assert!(d.is_empty());
        assert_eq!(min_term_count(&op), 0);
        assert!(d.as_sum().terms()[0].is_zero());
    }

    #[test]
    fn empty_fiber_never_reads_anchor_weight() {
        // β = 1 and β = 2 have empty C_β; the anchor 0 carries weight 5, which
        // must not leak into rows 1 and 2 of the adjoint.
        let op = WgsOperator::from_parts(vec![0, 0, 0], reals(&[5., 1., 0.])).unwrap();
        let d = adjoint_decompose(&op);
        assert_eq!(d.len(), 2);
        assert_eq!(
            to_dense_terms(3, d.terms()).unwrap(),
            conjugate_transpose(&to_dense(&op))
        );
    }

    #[test]
    fn term_counts() {
        let perm = WgsOperator::from_parts(vec![2, 0, 1], reals(&[1., -3., 0.5])).unwrap();
        assert_eq!(min_term_count(&perm), 1);
        let constant = WgsOperator::from_parts(vec![0; 4], reals(&[1., 2., 3., 4.])).unwrap();
        assert_eq!(min_term_count(&constant), 4);
        for seed in 0..20 {
            let op = random_operator(10, seed, 0.4).unwrap();
            assert_eq!(min_term_count(&op), adjoint_decompose(&op).len());
        }
    }

    #[test]
    fn separation_bound() {
        assert_eq!(term_bound_from_separation(5.0, 1.0).unwrap(), 27);
        assert_eq!(term_bound_from_separation(0.0, 0.3).unwrap(), 2);
        assert_eq!(term_bound_from_separation(1.0, 1.0).unwrap(), 3);
        assert!(term_bound_from_separation(1.0, 0.0).is_err());
        assert!(term_bound_from_separation(1.0, -1.0).is_err());
        assert!(term_bound_from_separation(-1.0, 1.0).is_err());
    }

    #[test]
    fn unimodular_unit_norm_fibers_are_thin() {
        // Every self-map of {0,1,2} with weights in {0,1}: when the norm is 1,
        // each fiber carries at most one nonzero weight.
        for code in 0..27usize {
            let image = vec![code % 3, (code / 3) % 3, code / 9];
            for mask in 0..8usize {
                let w: Vec<f64> = (0..3).map(|b| ((mask >> b) & 1) as f64).collect();
                let op = WgsOperator::from_parts(image.clone(), reals(&w)).unwrap();
                if (fiber_norm(&op) - 1.0).abs() < 1e-12 {
                    let count = min_term_count(&op);
                    assert!(count <= 1);
                    assert!(count < term_bound_from_separation(1.0, 1.0).unwrap());
                }
            }
        }
    }

    #[test]
    fn adjoint_of_sums() {
        let op = random_operator(6, 9, 0.2).unwrap();
        assert_eq!(
            adjoint_of_sum(&SumOperator::single(op.clone())),
            adjoint_decompose(&op).into_terms()
        );
        let twice = adjoint_of_sum(&SumOperator::new(vec![op.clone(), op.clone()]).unwrap());
        let once = adjoint_decompose(&op).into_terms();
        assert_eq!(twice.len(), 2 * once.len());
        assert_eq!(&twice[..once.len()], &once[..]);
        assert_eq!(&twice[once.len()..], &once[..]);

        let s = SumOperator::new(
            (0..3)
                .map(|k| random_operator(8, 100 + k, 0.3).unwrap())
                .collect(),
        )
        .unwrap();
        let adj = adjoint_of_sum(&s);
        let lhs = to_dense_terms(8, &adj).unwrap();
        let rhs = conjugate_transpose(&crate::oracle::to_dense_sum(&s));
        assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-15);
    }
}
