//! Dense-matrix ground truth.
//!
//! Everything here works on plain `n × n` complex matrices and knows nothing
//! about fibers or index maps beyond [`to_dense`]. The symbolic results of the
//! other modules are cross-checked against it.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};
use crate::model::{IndexMap, L2Vector, Scalar, SumOperator, WeightVector, WgsOperator};

/// Default cap on oracle dimension; dense storage is `O(n²)`.
pub const DEFAULT_MAX_DIM: usize = 2048;

pub const DEFAULT_MAX_ITERS: usize = 10_000;
pub const DEFAULT_POWER_TOL: f64 = 1e-12;

const START_VECTOR_SEED: u64 = 0x5eed_0f_5ba1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub max_dim: usize,
    pub max_iters: usize,
    pub power_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            max_dim: DEFAULT_MAX_DIM,
            max_iters: DEFAULT_MAX_ITERS,
            power_tol: DEFAULT_POWER_TOL,
        }
    }
}

impl OracleConfig {
    pub fn check(&self, n: usize) -> Result<()> {
        if n > self.max_dim {
            Err(Error::Domain(format!(
                "dimension {n} exceeds oracle cap {}",
                self.max_dim
            )))
        } else {
            Ok(())
        }
    }
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    entries: Vec<Scalar>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            entries: vec![Scalar::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = Scalar::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Validation("matrix must be nonempty".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            check_dim(n, row.len())?;
            if row.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::Validation("matrix entries must be finite".into()));
            }
            entries.extend(row);
        }
        Ok(DenseMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn mul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_dim(self.n, other.n)?;
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Scalar::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * other.entries[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> Result<f64> {
        check_dim(self.n, other.n)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.entries[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.entries[i * self.n + j]
    }
}

/// Row `α` carries `w[α]` in column `φ(α)`.
pub fn to_dense(op: &WgsOperator) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(op.n());
    for alpha in 0..op.n() {
        m[(alpha, op.phi().get(alpha))] = op.weights().get(alpha);
    }
    m
}

/// Entrywise sum of the dense forms, accumulated in term order.
pub fn to_dense_terms(n: usize, terms: &[WgsOperator]) -> Result<DenseMatrix> {
    let mut m = DenseMatrix::zeros(n);
    for t in terms {
        check_dim(n, t.n())?;
        for alpha in 0..n {
            m[(alpha, t.phi().get(alpha))] += t.weights().get(alpha);
        }
    }
    Ok(m)
}

pub fn to_dense_sum(s: &SumOperator) -> DenseMatrix {
    to_dense_terms(s.n(), s.terms()).expect("sum terms share one dimension")
}

pub fn conjugate_transpose(m: &DenseMatrix) -> DenseMatrix {
    let n = m.n;
    let mut out = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = m[(j, i)].conj();
        }
    }
    out
}

pub fn matvec(m: &DenseMatrix, x: &L2Vector) -> Result<L2Vector> {
    check_dim(m.n, x.n())?;
    let coords = (0..m.n)
        .map(|i| m.row(i).iter().zip(x.coords()).map(|(a, b)| a * b).sum())
        .collect();
    L2Vector::new(coords)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralNorm {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

fn raw_matvec(m: &DenseMatrix, x: &[Scalar], out: &mut [Scalar]) {
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = m.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
    }
}

fn raw_matvec_adjoint(m: &DenseMatrix, x: &[Scalar], out: &mut [Scalar]) {
    out.iter_mut().for_each(|z| *z = Scalar::new(0.0, 0.0));
    for (i, xi) in x.iter().enumerate() {
        for (slot, a) in out.iter_mut().zip(m.row(i)) {
            *slot += a.conj() * xi;
        }
    }
}

fn normalize(v: &mut [Scalar]) -> f64 {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|z| *z /= norm);
    }
    norm
}

/// Plain power iteration on `mᴴm`.
///
/// The start vector is drawn from a fixed seed. Iteration stops once two
/// successive Rayleigh quotients agree to `tol` relatively; otherwise the last
/// estimate is returned with `converged = false`.
pub fn power_iteration(m: &DenseMatrix, max_iters: usize, tol: f64) -> SpectralNorm {
    power_iteration_from(m, &mut start_vector(m.n), max_iters, tol)
}

fn start_vector(n: usize) -> Vec<Scalar> {
    let mut rng = ChaCha8Rng::seed_from_u64(START_VECTOR_SEED);
    let mut v: Vec<Scalar> = (0..n)
        .map(|_| Scalar::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    normalize(&mut v);
    v
}

/// Runs from the unit vector `v`, leaving the last iterate in it.
fn power_iteration_from(
    m: &DenseMatrix,
    v: &mut [Scalar],
    max_iters: usize,
    tol: f64,
) -> SpectralNorm {
    let mut mv = vec![Scalar::new(0.0, 0.0); m.n];
    let mut prev = f64::NAN;
    let mut estimate = 0.0;
    for iter in 1..=max_iters.max(1) {
        raw_matvec(m, v, &mut mv);
        // Rayleigh quotient of mᴴm at unit v is |m v|².
        estimate = mv.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if (estimate - prev).abs() <= tol * estimate || estimate == 0.0 {
            return SpectralNorm {
                value: estimate.sqrt(),
                converged: true,
                iterations: iter,
            };
        }
        prev = estimate;
        raw_matvec_adjoint(m, &mv, v);
        if normalize(v) == 0.0 {
            break;
        }
    }
    SpectralNorm {
        value: estimate.sqrt(),
        converged: false,
        iterations: max_iters.max(1),
    }
}

/// Most squarings attempted after plain iteration stalls; `2^64` steps.
const MAX_SQUARINGS: usize = 64;

/// Largest singular value of `m`.
///
/// Starts with [`power_iteration`]. When two singular values nearly tie it can
/// stall, so the power method continues on `G, G², G⁴, ...` with `G = mᴴm`,
/// each rescaled to unit max entry, until successive Rayleigh quotients of `G`
/// agree to `tol`. `iterations` counts plain steps plus squarings.
pub fn spectral_norm(m: &DenseMatrix, max_iters: usize, tol: f64) -> SpectralNorm {
    let mut v = start_vector(m.n);
    let plain = power_iteration_from(m, &mut v, max_iters, tol);
    if plain.converged {
        return plain;
    }
    let gram = conjugate_transpose(m).mul(m).expect("square");
    let mut power = gram.clone();
    let mut prev = plain.value * plain.value;
    let mut w = vec![Scalar::new(0.0, 0.0); m.n];
    for squaring in 1..=MAX_SQUARINGS {
        power = power.mul(&power).expect("square");
        let scale = power.entries.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 || !scale.is_finite() {
            break;
        }
        power.entries.iter_mut().for_each(|z| *z /= scale);
        raw_matvec(&power, &v, &mut w);
        if normalize(&mut w) == 0.0 {
            break;
        }
        v.copy_from_slice(&w);
        let mut mv = vec![Scalar::new(0.0, 0.0); m.n];
        raw_matvec(m, &v, &mut mv);
        let estimate = mv.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if (estimate - prev).abs() <= tol * estimate {
            return SpectralNorm {
                value: estimate.sqrt(),
                converged: true,
                iterations: plain.iterations + squaring,
            };
        }
        prev = estimate;
    }
    SpectralNorm {
        value: prev.sqrt(),
        converged: false,
        iterations: plain.iterations + MAX_SQUARINGS,
    }
}

pub fn hermitian_test(m: &DenseMatrix, tol: f64) -> bool {
    let n = m.n;
    (0..n).all(|i| (0..n).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol))
}

/// `mᴴm ≈ I` and `m mᴴ ≈ I` entrywise within `tol`.
pub fn unitary_test(m: &DenseMatrix, tol: f64) -> bool {
    let h = conjugate_transpose(m);
    let id = DenseMatrix::identity(m.n);
    let close = |p: DenseMatrix| p.max_abs_diff(&id).map(|d| d <= tol).unwrap_or(false);
    close(h.mul(m).expect("same dimension")) && close(m.mul(&h).expect("same dimension"))
}

/// Uniform on the annulus `0.1 <= |z| <= 2` (uniform by area).
pub fn random_annulus_weight<R: Rng + ?Sized>(rng: &mut R) -> Scalar {
    let r = rng.gen_range(0.01f64..=4.0).sqrt();
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, theta)
}

pub fn random_index_map<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<IndexMap> {
    IndexMap::new((0..n).map(|_| rng.gen_range(0..n)).collect())
}

pub fn random_permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<IndexMap> {
    use rand::seq::SliceRandom;
    let mut image: Vec<usize> = (0..n).collect();
    image.shuffle(rng);
    IndexMap::new(image)
}

/// Unit-scale random vector, real and imaginary parts uniform in `[-1, 1]`.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<L2Vector> {
    L2Vector::new(
        (0..n)
            .map(|_| Scalar::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
            .collect(),
    )
}

/// Deterministic random operator: `φ` uniform over all self-maps, each weight
/// zero with probability `zero_weight_probability` and otherwise uniform on
/// the annulus `0.1 <= |z| <= 2`.
pub fn random_operator(n: usize, seed: u64, zero_weight_probability: f64) -> Result<WgsOperator> {
    if !(0.0..=1.0).contains(&zero_weight_probability) {
        return Err(Error::Domain(format!(
            "zero_weight_probability {zero_weight_probability} not in [0,1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = random_index_map(&mut rng, n)?;
    let weights = (0..n)
        .map(|_| {
            if rng.gen_bool(zero_weight_probability) {
                Scalar::new(0.0, 0.0)
            } else {
                random_annulus_weight(&mut rng)
            }
        })
        .collect();
    WgsOperator::new(phi, WeightVector::new(weights)?)
}
