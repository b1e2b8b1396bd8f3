//! Adjoint invariance of the additive semigroup generated by
//! `A ∪ {0}`-weighted generalized shifts.
//!
//! An infinite index set is modeled by letting the dimension grow: a property
//! "holds on an infinite-dimensional space" when it holds uniformly over all
//! truncations. For an alphabet accumulating at 0 the counterexample family
//! below needs `n - 1` adjoint terms at dimension `n`, so no uniform finite sum
//! exists.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::adjoint::{adjoint_of_sum, min_term_count};
use crate::analysis::{fiber_norm, nonzero_invertibility_bound};
use crate::error::{Error, Result};
use crate::model::{IndexMap, Scalar, SumOperator, WeightVector, WgsOperator};
use crate::tolerance::Tolerance;

/// Conjugate-invariance spot checks on null sequences use this many elements.
pub const DEFAULT_SAMPLES: usize = 64;

/// Closed-form sequence `t_1, t_2, ...` with `0 < |t_{k+1}| < |t_k| < 1/k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum NullSequenceRule {
    /// `t_k = 1/(k+1)`.
    Reciprocal,
    /// `t_k = scale · ratio^k`.
    Geometric { scale: f64, ratio: f64 },
}

impl NullSequenceRule {
    /// Geometric rule with the scale chosen so that `k·t_k <= 1/2` for all k.
    pub fn geometric(ratio: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::Domain(format!(
                "ratio must lie in (0,1), got {ratio}"
            )));
        }
        // k·r^k peaks near k = -1/ln r.
        let peak = -1.0 / ratio.ln();
        let best = [1.0, peak.floor().max(1.0), peak.ceil().max(1.0)]
            .into_iter()
            .map(|k| k * ratio.powf(k))
            .fold(0.0, f64::max);
        Ok(NullSequenceRule::Geometric {
            scale: 0.5 / best,
            ratio,
        })
    }

    pub fn geometric_with_scale(scale: f64, ratio: f64) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::Domain(format!(
                "ratio must lie in (0,1), got {ratio}"
            )));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Domain(format!(
                "scale must be positive, got {scale}"
            )));
        }
        Ok(NullSequenceRule::Geometric { scale, ratio })
    }

    /// `t_k` for `k >= 1`.
    pub fn element(&self, k: usize) -> Scalar {
        let k = k as f64;
        match *self {
            NullSequenceRule::Reciprocal => Scalar::new(1.0 / (k + 1.0), 0.0),
            NullSequenceRule::Geometric { scale, ratio } => Scalar::new(scale * ratio.powf(k), 0.0),
        }
    }

    /// Checks `0 < |t_{k+1}| < |t_k| < 1/k` for `k = 1..=len`.
    pub fn validate_prefix(&self, len: usize) -> Result<()> {
        for k in 1..=len {
            let t = self.element(k).norm();
            let next = self.element(k + 1).norm();
            if !(t < 1.0 / k as f64) {
                return Err(Error::Domain(format!(
                    "null sequence violates |t_{k}| < 1/{k}: |t_{k}| = {t}"
                )));
            }
            if !(next > 0.0 && next < t) {
                return Err(Error::Domain(format!(
                    "null sequence not strictly decreasing and nonzero at k={k}"
                )));
            }
        }
        Ok(())
    }

    /// Whether `z` equals some `t_k`. Terminates because `|t_k|` decreases.
    pub fn contains(&self, z: Scalar, tol: &Tolerance) -> bool {
        let r = z.norm();
        if r == 0.0 {
            return false;
        }
        let mut k = 1;
        loop {
            let t = self.element(k);
            if tol.eq(t, z) {
                return true;
            }
            if t.norm() + tol.atol + tol.rtol * r < r || t.norm() == 0.0 {
                return false;
            }
            k += 1;
        }
    }
}

impl fmt::Display for NullSequenceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NullSequenceRule::Reciprocal => write!(f, "reciprocal"),
            NullSequenceRule::Geometric { scale, ratio } => {
                write!(f, "geometric(scale={scale}, ratio={ratio})")
            }
        }
    }
}

/// `reciprocal`, `geometric:<ratio>` or `geometric:<ratio>:<scale>`.
impl FromStr for NullSequenceRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |v: &str| {
            v.parse::<f64>()
                .map_err(|e| Error::Validation(format!("bad number {v:?} in rule {s:?}: {e}")))
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["reciprocal"] => Ok(NullSequenceRule::Reciprocal),
            ["geometric", r] => NullSequenceRule::geometric(parse(r)?),
            ["geometric", r, c] => NullSequenceRule::geometric_with_scale(parse(c)?, parse(r)?),
            _ => Err(Error::Validation(format!(
                "unknown null sequence rule {s:?} (expected reciprocal or geometric:<ratio>)"
            ))),
        }
    }
}

/// A weight alphabet `A ⊆ ℂ`; zero is always adjoined separately.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightAlphabet {
    Finite(Vec<Scalar>),
    /// `{z : |z| >= delta}`.
    Annulus {
        delta: f64,
    },
    NullSequence(NullSequenceRule),
}

impl WeightAlphabet {
    pub fn finite(elements: Vec<Scalar>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Validation("finite alphabet must be nonempty".into()));
        }
        for (i, z) in elements.iter().enumerate() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::Validation(format!("elements[{i}] is not finite")));
            }
            if *z == Scalar::new(0.0, 0.0) {
                return Err(Error::Validation(format!(
                    "elements[{i}] is zero; zero is adjoined implicitly"
                )));
            }
            if elements[..i].contains(z) {
                return Err(Error::Validation(format!(
                    "elements[{i}]={z} is a duplicate"
                )));
            }
        }
        Ok(WeightAlphabet::Finite(elements))
    }

    pub fn annulus(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::Validation(format!(
                "annulus delta must be positive, got {delta}"
            )));
        }
        Ok(WeightAlphabet::Annulus { delta })
    }

    pub fn contains(&self, z: Scalar, tol: &Tolerance) -> bool {
        match self {
            WeightAlphabet::Finite(elements) => elements.iter().any(|&a| tol.eq(a, z)),
            WeightAlphabet::Annulus { delta } => z.norm() >= delta - tol.atol - tol.rtol * delta,
            WeightAlphabet::NullSequence(rule) => rule.contains(z, tol),
        }
    }

    /// Membership in `A ∪ {0}`.
    pub fn contains_or_zero(&self, z: Scalar, tol: &Tolerance) -> bool {
        tol.is_zero(z) || self.contains(z, tol)
    }
}

pub fn is_conjugate_invariant_with(a: &WeightAlphabet, samples: usize, tol: &Tolerance) -> bool {
    match a {
        WeightAlphabet::Finite(elements) => elements.iter().all(|z| a.contains(z.conj(), tol)),
        WeightAlphabet::Annulus { .. } => true,
        WeightAlphabet::NullSequence(rule) => {
            let sampled: Vec<Scalar> = (1..=samples.max(1)).map(|k| rule.element(k)).collect();
            sampled
                .iter()
                .all(|t| sampled.iter().any(|&s| tol.eq(s, t.conj())))
        }
    }
}

pub fn is_conjugate_invariant(a: &WeightAlphabet, samples: usize) -> bool {
    is_conjugate_invariant_with(a, samples, &Tolerance::default())
}

pub fn zero_is_limit_point(a: &WeightAlphabet) -> bool {
    matches!(a, WeightAlphabet::NullSequence(_))
}

/// The semigroup is adjoint invariant iff the index set is finite or 0 is not
/// a limit point of `A`. Requires a conjugate-invariant `A`.
pub fn predict_adjoint_invariance(a: &WeightAlphabet, tau_finite: bool) -> Result<bool> {
    if !is_conjugate_invariant(a, DEFAULT_SAMPLES) {
        return Err(Error::Domain("alphabet is not conjugate invariant".into()));
    }
    Ok(tau_finite || !zero_is_limit_point(a))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureWitness {
    /// Index into the adjoint's term list.
    pub term: usize,
    pub beta: usize,
    pub weight: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureReport {
    pub closed: bool,
    pub adjoint_term_count: usize,
    pub witnesses: Vec<ClosureWitness>,
}

pub fn check_closure_with(
    s: &SumOperator,
    a: &WeightAlphabet,
    tol: &Tolerance,
) -> Result<ClosureReport> {
    if !is_conjugate_invariant_with(a, DEFAULT_SAMPLES, tol) {
        return Err(Error::Domain("alphabet is not conjugate invariant".into()));
    }
    for (t, term) in s.terms().iter().enumerate() {
        for (alpha, &w) in term.weights().entries().iter().enumerate() {
            if !a.contains_or_zero(w, tol) {
                return Err(Error::Domain(format!(
                    "term {t} weight w[{alpha}]={w} is not in the alphabet"
                )));
            }
        }
    }
    let adjoint = adjoint_of_sum(s);
    let witnesses: Vec<ClosureWitness> = adjoint
        .iter()
        .enumerate()
        .flat_map(|(t, term)| {
            term.weights()
                .entries()
                .iter()
                .enumerate()
                .filter(|(_, &u)| !a.contains_or_zero(u, tol))
                .map(move |(beta, u)| ClosureWitness {
                    term: t,
                    beta,
                    weight: [u.re, u.im],
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(ClosureReport {
        closed: witnesses.is_empty(),
        adjoint_term_count: adjoint.len(),
        witnesses,
    })
}

pub fn check_closure(s: &SumOperator, a: &WeightAlphabet) -> Result<ClosureReport> {
    check_closure_with(s, a, &Tolerance::default())
}

/// `φ ≡ 1`, `v[0] = 0`, `v[k] = t_k` for `1 <= k < n`.
pub fn counterexample_operator(n: usize, rule: &NullSequenceRule) -> Result<WgsOperator> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "counterexample needs n >= 2, got {n}"
        )));
    }
    rule.validate_prefix(n - 1)?;
    let weights = std::iter::once(Scalar::new(0.0, 0.0))
        .chain((1..n).map(|k| rule.element(k)))
        .collect();
    WgsOperator::new(IndexMap::constant(n, 1)?, WeightVector::new(weights)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationStudy {
    pub rule: NullSequenceRule,
    pub dimensions: Vec<usize>,
    pub term_counts: Vec<usize>,
    pub norm_bounds: Vec<f64>,
    pub invertibility_bounds: Vec<f64>,
}

impl TruncationStudy {
    pub fn rows(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        (0..self.dimensions.len()).map(move |i| {
            (
                self.dimensions[i],
                self.term_counts[i],
                self.norm_bounds[i],
                self.invertibility_bounds[i],
            )
        })
    }

    /// Aligned plain-text table, one row per dimension.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:>8}  {:>11}  {:>14}  {:>18}\n",
            "n", "adj_terms", "fiber_norm", "sup(|w|+1/|w|)"
        );
        for (n, terms, norm, inv) in self.rows() {
            out.push_str(&format!(
                "{n:>8}  {terms:>11}  {norm:>14.10}  {inv:>18.6}\n"
            ));
        }
        out
    }
}

pub fn run_truncation_study(
    rule: &NullSequenceRule,
    dimensions: &[usize],
) -> Result<TruncationStudy> {
    if dimensions.is_empty() {
        return Err(Error::Domain("study needs at least one dimension".into()));
    }
    if let Some(w) = dimensions.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::Domain(format!(
            "dimensions must be strictly ascending ({} then {})",
            w[0], w[1]
        )));
    }
    let mut study = TruncationStudy {
        rule: *rule,
        dimensions: dimensions.to_vec(),
        term_counts: Vec::with_capacity(dimensions.len()),
        norm_bounds: Vec::with_capacity(dimensions.len()),
        invertibility_bounds: Vec::with_capacity(dimensions.len()),
    };
    for &n in dimensions {
        let op = counterexample_operator(n, rule)?;
        study.term_counts.push(min_term_count(&op));
        study.norm_bounds.push(fiber_norm(&op));
        study
            .invertibility_bounds
            .push(nonzero_invertibility_bound(&op).expect("t_1 is nonzero"));
    }
    Ok(study)
}
