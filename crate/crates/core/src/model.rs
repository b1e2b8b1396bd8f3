//! Value types: index maps, weight vectors, weighted generalized shifts and
//! their finite sums, acting on vectors of `l2({0..n-1})`.
//!
//! A weighted generalized shift `T = σ(φ, w)` acts by
//! `(T x)[α] = w[α] * x[φ(α)]`. Every constructor validates its invariants,
//! so a value that exists is always well formed.

use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};

pub type Scalar = Complex64;

fn check_finite(what: &str, entries: &[Scalar]) -> Result<()> {
    match entries
        .iter()
        .position(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        Some(i) => Err(Error::Validation(format!(
            "{what}[{i}]={} is not finite",
            entries[i]
        ))),
        None => Ok(()),
    }
}

fn check_positive(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Validation("dimension must be positive".into()))
    } else {
        Ok(())
    }
}

/// A total self-map `φ` of `{0..n-1}`, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexMap {
    image: Vec<usize>,
}

impl IndexMap {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        check_positive(n)?;
        if let Some((alpha, &beta)) = image.iter().enumerate().find(|(_, &b)| b >= n) {
            return Err(Error::Validation(format!(
                "phi[{alpha}]={beta} out of range [0,{n})"
            )));
        }
        Ok(IndexMap { image })
    }

    pub fn identity(n: usize) -> Result<Self> {
        IndexMap::new((0..n).collect())
    }

    pub fn constant(n: usize, target: usize) -> Result<Self> {
        if target >= n {
            return Err(Error::IndexOutOfRange { index: target, n });
        }
        IndexMap::new(vec![target; n])
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    #[inline]
    pub fn get(&self, alpha: usize) -> usize {
        self.image[alpha]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// `|φ⁻¹(β)|` for every β.
    pub fn fiber_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n()];
        for &beta in &self.image {
            sizes[beta] += 1;
        }
        sizes
    }

    /// Number of distinct values in the image, `|φ(τ)|`.
    pub fn image_size(&self) -> usize {
        self.fiber_sizes().iter().filter(|&&s| s > 0).count()
    }

    pub fn is_injective(&self) -> bool {
        self.fiber_sizes().iter().all(|&s| s <= 1)
    }

    /// On a finite set injective and bijective coincide.
    pub fn is_bijective(&self) -> bool {
        self.is_injective()
    }
}

/// Weights `w[α]`, all finite.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    entries: Vec<Scalar>,
}

impl WeightVector {
    pub fn new(entries: Vec<Scalar>) -> Result<Self> {
        check_positive(entries.len())?;
        check_finite("weights", &entries)?;
        Ok(WeightVector { entries })
    }

    pub fn from_reals(values: &[f64]) -> Result<Self> {
        WeightVector::new(values.iter().map(|&v| Scalar::new(v, 0.0)).collect())
    }

    pub fn constant(n: usize, value: Scalar) -> Result<Self> {
        WeightVector::new(vec![value; n])
    }

    pub fn zeros(n: usize) -> Result<Self> {
        WeightVector::constant(n, Scalar::new(0.0, 0.0))
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn get(&self, alpha: usize) -> Scalar {
        self.entries[alpha]
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    /// `sup |w[α]|`.
    pub fn sup_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// The operator `σ(φ, w)`: `x ↦ (w[α] x[φ(α)])_α`.
#[derive(Debug, Clone, PartialEq)]
pub struct WgsOperator {
    phi: IndexMap,
    weights: WeightVector,
}

impl WgsOperator {
    pub fn new(phi: IndexMap, weights: WeightVector) -> Result<Self> {
        check_dim(phi.n(), weights.n())?;
        Ok(WgsOperator { phi, weights })
    }

    /// Convenience constructor from raw parts.
    pub fn from_parts(image: Vec<usize>, weights: Vec<Scalar>) -> Result<Self> {
        WgsOperator::new(IndexMap::new(image)?, WeightVector::new(weights)?)
    }

    pub fn identity(n: usize) -> Result<Self> {
        WgsOperator::new(
            IndexMap::identity(n)?,
            WeightVector::constant(n, Scalar::new(1.0, 0.0))?,
        )
    }

    /// The zero operator on dimension `n` (identity map, all weights zero).
    pub fn zero(n: usize) -> Result<Self> {
        WgsOperator::new(IndexMap::identity(n)?, WeightVector::zeros(n)?)
    }

    /// Unweighted generalized shift `σ(φ)`, all weights 1.
    pub fn unweighted(phi: IndexMap) -> Self {
        let n = phi.n();
        let weights = WeightVector {
            entries: vec![Scalar::new(1.0, 0.0); n],
        };
        WgsOperator { phi, weights }
    }

    pub fn n(&self) -> usize {
        self.phi.n()
    }

    pub fn phi(&self) -> &IndexMap {
        &self.phi
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn is_zero(&self) -> bool {
        self.weights
            .entries
            .iter()
            .all(|z| *z == Scalar::new(0.0, 0.0))
    }

    pub fn apply(&self, x: &L2Vector) -> Result<L2Vector> {
        check_dim(self.n(), x.n())?;
        let coords = (0..self.n())
            .map(|alpha| self.weights.get(alpha) * x.get(self.phi.get(alpha)))
            .collect();
        Ok(L2Vector { coords })
    }

    /// Same operator with a single weight replaced.
    pub fn with_weight(&self, alpha: usize, value: Scalar) -> Result<Self> {
        if alpha >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: alpha,
                n: self.n(),
            });
        }
        let mut entries = self.weights.entries.clone();
        entries[alpha] = value;
        WgsOperator::new(self.phi.clone(), WeightVector::new(entries)?)
    }
}

/// A finite sum `T_1 + ... + T_m` of weighted generalized shifts: an element of
/// the additive semigroup they generate.
#[derive(Debug, Clone, PartialEq)]
pub struct SumOperator {
    terms: Vec<WgsOperator>,
}

impl SumOperator {
    pub fn new(terms: Vec<WgsOperator>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Validation("a sum needs at least one term".into()))?;
        let n = first.n();
        for t in &terms[1..] {
            check_dim(n, t.n())?;
        }
        Ok(SumOperator { terms })
    }

    pub fn single(op: WgsOperator) -> Self {
        SumOperator { terms: vec![op] }
    }

    pub fn n(&self) -> usize {
        self.terms[0].n()
    }

    pub fn terms(&self) -> &[WgsOperator] {
        &self.terms
    }

    pub fn apply(&self, x: &L2Vector) -> Result<L2Vector> {
        check_dim(self.n(), x.n())?;
        let mut acc = vec![Scalar::new(0.0, 0.0); self.n()];
        for term in &self.terms {
            let phi = term.phi();
            let w = term.weights();
            for (alpha, slot) in acc.iter_mut().enumerate() {
                *slot += w.get(alpha) * x.get(phi.get(alpha));
            }
        }
        Ok(L2Vector { coords: acc })
    }
}

/// A vector of `l2({0..n-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct L2Vector {
    coords: Vec<Scalar>,
}

impl L2Vector {
    pub fn new(coords: Vec<Scalar>) -> Result<Self> {
        check_positive(coords.len())?;
        check_finite("coords", &coords)?;
        Ok(L2Vector { coords })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        L2Vector::new(vec![Scalar::new(0.0, 0.0); n])
    }

    /// The basis vector `e_θ`.
    pub fn basis(n: usize, theta: usize) -> Result<Self> {
        check_positive(n)?;
        if theta >= n {
            return Err(Error::IndexOutOfRange { index: theta, n });
        }
        let mut coords = vec![Scalar::new(0.0, 0.0); n];
        coords[theta] = Scalar::new(1.0, 0.0);
        Ok(L2Vector { coords })
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn get(&self, alpha: usize) -> Scalar {
        self.coords[alpha]
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Scalar> {
        self.coords
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self, other⟩ = Σ self[α] · conj(other[α])`.
    pub fn inner(&self, other: &L2Vector) -> Result<Scalar> {
        check_dim(self.n(), other.n())?;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b.conj())
            .sum())
    }
}

pub fn basis_vector(n: usize, theta: usize) -> Result<L2Vector> {
    L2Vector::basis(n, theta)
}

pub fn inner_product(x: &L2Vector, y: &L2Vector) -> Result<Scalar> {
    x.inner(y)
}

pub fn apply(op: &WgsOperator, x: &L2Vector) -> Result<L2Vector> {
    op.apply(x)
}

pub fn apply_sum(s: &SumOperator, x: &L2Vector) -> Result<L2Vector> {
    s.apply(x)
}
