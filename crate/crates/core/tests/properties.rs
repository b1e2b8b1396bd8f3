use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wgshift_core::adjoint::{adjoint_decompose, adjoint_of_sum, build_fibers, min_term_count};
use wgshift_core::analysis::{fiber_norm, is_self_adjoint, is_unitary};
use wgshift_core::oracle::{
    conjugate_transpose, hermitian_test, matvec, random_operator, random_vector, spectral_norm,
    to_dense, to_dense_terms, unitary_test, DenseMatrix,
};
use wgshift_core::semigroup::{check_closure, WeightAlphabet};
use wgshift_core::{
    term_bound_from_separation, IndexMap, L2Vector, Scalar, SumOperator, WeightVector, WgsOperator,
};

fn c(re: f64, im: f64) -> Scalar {
    Scalar::new(re, im)
}

/// Adjoint matrix from the defining identity only:
/// `(T*)[i][j] = ⟨T* e_j, e_i⟩ = conj((T e_i)[j])`.
fn brute_force_adjoint(op: &WgsOperator) -> Vec<Vec<Scalar>> {
    let n = op.n();
    let mut adj = vec![vec![c(0., 0.); n]; n];
    for i in 0..n {
        let image = op.apply(&L2Vector::basis(n, i).unwrap()).unwrap();
        for j in 0..n {
            adj[i][j] = image.get(j).conj();
        }
    }
    adj
}

fn dense_rows(m: &DenseMatrix) -> Vec<Vec<Scalar>> {
    (0..m.n()).map(|i| m.row(i).to_vec()).collect()
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(a, b)| c(a, b))
}

fn weight() -> impl Strategy<Value = Scalar> {
    prop_oneof![1 => Just(c(0., 0.)), 3 => scalar()]
}

prop_compose! {
    fn operator(max_n: usize)(n in 1..=max_n)
        (image in proptest::collection::vec(0..n, n), w in proptest::collection::vec(weight(), n))
        -> WgsOperator
    {
        WgsOperator::from_parts(image, w).unwrap()
    }
}

fn vector(n: usize) -> impl Strategy<Value = L2Vector> {
    proptest::collection::vec(scalar(), n).prop_map(|v| L2Vector::new(v).unwrap())
}

prop_compose! {
    fn operator_and_vectors(max_n: usize)(op in operator(max_n))
        (x in vector(op.n()), y in vector(op.n()), op in Just(op)) -> (WgsOperator, L2Vector, L2Vector)
    {
        (op, x, y)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn apply_is_linear((op, x, y) in operator_and_vectors(24), lambda in scalar()) {
        let combo = L2Vector::new(
            x.coords().iter().zip(y.coords()).map(|(a, b)| lambda * a + b).collect()
        ).unwrap();
        let lhs = op.apply(&combo).unwrap();
        let tx = op.apply(&x).unwrap();
        let ty = op.apply(&y).unwrap();
        for i in 0..op.n() {
            prop_assert!((lhs.get(i) - (lambda * tx.get(i) + ty.get(i))).norm() <= 1e-12 * 16.0);
        }
    }

    #[test]
    fn sparse_and_dense_apply_agree((op, x, _y) in operator_and_vectors(32)) {
        let sparse = op.apply(&x).unwrap();
        let dense = matvec(&to_dense(&op), &x).unwrap();
        for i in 0..op.n() {
            prop_assert!((sparse.get(i) - dense.get(i)).norm() <= 1e-12);
        }
    }

    #[test]
    fn self_inner_product_is_nonnegative_real(x in (1usize..16).prop_flat_map(vector)) {
        let ip = x.inner(&x).unwrap();
        prop_assert_eq!(ip.im, 0.0);
        prop_assert!(ip.re >= 0.0);
        prop_assert_eq!(ip.re == 0.0, x.coords().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn inner_product_is_conjugate_symmetric((_op, x, y) in operator_and_vectors(16)) {
        prop_assert_eq!(y.inner(&x).unwrap(), x.inner(&y).unwrap().conj());
    }

    #[test]
    fn dense_adjoint_identity((op, x, y) in operator_and_vectors(16)) {
        // Oracle level: arbitrary dense matrix built from the operator plus noise.
        let mut m = to_dense(&op);
        m[(0, op.n() - 1)] += c(0.25, -0.5);
        let lhs = matvec(&m, &x).unwrap().inner(&y).unwrap();
        let rhs = x.inner(&matvec(&conjugate_transpose(&m), &y).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + x.norm() * y.norm()));
    }

    #[test]
    fn conjugate_transpose_is_an_involution(op in operator(24)) {
        let m = to_dense(&op);
        prop_assert_eq!(conjugate_transpose(&conjugate_transpose(&m)), m);
    }

    #[test]
    fn decomposition_matches_brute_force_adjoint(op in operator(24)) {
        let d = adjoint_decompose(&op);
        let summed = to_dense_terms(op.n(), d.terms()).unwrap();
        prop_assert_eq!(dense_rows(&summed), brute_force_adjoint(&op));
        prop_assert_eq!(summed, conjugate_transpose(&to_dense(&op)));
    }

    #[test]
    fn decomposition_adjoint_identity((op, x, y) in operator_and_vectors(64)) {
        let d = adjoint_decompose(&op);
        let lhs = op.apply(&x).unwrap().inner(&y).unwrap();
        let rhs = x.inner(&d.apply(&y).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + x.norm() * y.norm()));
    }

    #[test]
    fn decomposing_twice_returns_the_original(op in operator(24)) {
        let d = adjoint_decompose(&op);
        let back = adjoint_of_sum(&d.as_sum());
        prop_assert_eq!(to_dense_terms(op.n(), &back).unwrap(), to_dense(&op));
    }

    #[test]
    fn decomposition_structure(op in operator(32)) {
        let d = adjoint_decompose(&op);
        let table = build_fibers(&op);
        prop_assert_eq!(d.len(), min_term_count(&op));
        prop_assert_eq!(d.len(), table.nonzero_counts().into_iter().max().unwrap_or(0));
        let sup_w = op.weights().sup_norm();
        for (i, term) in d.terms().iter().enumerate() {
            let mut seen = std::collections::HashSet::new();
            for beta in 0..op.n() {
                let u = term.weights().get(beta);
                let c_beta = table.nonzero_fiber(beta);
                if i < c_beta.len() {
                    prop_assert_eq!(term.phi().get(beta), c_beta[i]);
                    prop_assert_eq!(u, op.weights().get(c_beta[i]).conj());
                } else {
                    prop_assert_eq!(term.phi().get(beta), d.psi());
                    prop_assert_eq!(u, c(0., 0.));
                }
                if u != c(0., 0.) {
                    // Injective on the support.
                    prop_assert!(seen.insert(term.phi().get(beta)));
                    // Weight provenance.
                    prop_assert!(op.weights().entries().iter().any(|w| w.conj() == u));
                }
            }
            // Each term is bounded by sup |w| <= M.
            prop_assert!(fiber_norm(term) <= sup_w + 1e-15);
            prop_assert!(sup_w <= d.source_norm() + 1e-15);
        }
    }

    #[test]
    fn fibers_partition_the_index_set(op in operator(32)) {
        let table = build_fibers(&op);
        let mut count = vec![0; op.n()];
        for (beta, fiber) in table.fibers().iter().enumerate() {
            prop_assert!(fiber.windows(2).all(|w| w[0] < w[1]));
            for &alpha in fiber {
                prop_assert_eq!(op.phi().get(alpha), beta);
                count[alpha] += 1;
            }
            let nz = table.nonzero_fiber(beta);
            prop_assert!(nz.iter().all(|a| fiber.contains(a)));
            prop_assert_eq!(
                nz.len(),
                fiber.iter().filter(|&&a| op.weights().get(a) != c(0., 0.)).count()
            );
        }
        prop_assert!(count.iter().all(|&k| k == 1));
    }

    #[test]
    fn spectral_norm_is_adjoint_invariant(op in operator(24)) {
        let m = to_dense(&op);
        let a = spectral_norm(&m, 10_000, 1e-12).value;
        let b = spectral_norm(&conjugate_transpose(&m), 10_000, 1e-12).value;
        prop_assert!((a - b).abs() <= 1e-6 * a.max(b).max(1e-300));
        prop_assert!((a - fiber_norm(&op)).abs() <= 1e-6 * a.max(1e-300));
    }
}

/// Random involution with conjugate-paired weights and real fixed-point weights.
fn self_adjoint_instance(rng: &mut ChaCha8Rng, n: usize) -> WgsOperator {
    let mut order: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(&mut order[..], rng);
    let mut image: Vec<usize> = (0..n).collect();
    let mut w = vec![c(0., 0.); n];
    let mut k = 0;
    while k < n {
        if k + 1 < n && rng.gen_bool(0.6) {
            let (a, b) = (order[k], order[k + 1]);
            image[a] = b;
            image[b] = a;
            let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            w[a] = z;
            w[b] = z.conj();
            k += 2;
        } else {
            w[order[k]] = c(rng.gen_range(-2.0..2.0), 0.0);
            k += 1;
        }
    }
    WgsOperator::from_parts(image, w).unwrap()
}

#[test]
fn self_adjoint_predicate_matches_hermitian_test() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for seed in 0..200 {
        let op = random_operator(1 + seed as usize % 20, seed, 0.5).unwrap();
        assert_eq!(is_self_adjoint(&op), hermitian_test(&to_dense(&op), 1e-9));
    }
    for _ in 0..100 {
        let n = rng.gen_range(1..24);
        let op = self_adjoint_instance(&mut rng, n);
        assert!(is_self_adjoint(&op));
        assert!(hermitian_test(&to_dense(&op), 1e-9));
        let d = adjoint_decompose(&op);
        assert_eq!(to_dense_terms(n, d.terms()).unwrap(), to_dense(&op));

        let alpha = rng.gen_range(0..n);
        let bumped = op
            .with_weight(alpha, op.weights().get(alpha) + c(0., 1e-3))
            .unwrap();
        assert!(!is_self_adjoint(&bumped));
        assert!(!hermitian_test(&to_dense(&bumped), 1e-9));
    }
}

#[test]
fn unitary_predicate_matches_dense_test() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let n = rng.gen_range(1..16);
        let phi = wgshift_core::oracle::random_permutation(&mut rng, n).unwrap();
        let w: Vec<Scalar> = (0..n)
            .map(|_| {
                let r = if rng.gen_bool(0.7) {
                    1.0
                } else {
                    rng.gen_range(0.5..2.0)
                };
                Scalar::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        let op = WgsOperator::new(phi, WeightVector::new(w).unwrap()).unwrap();
        assert_eq!(is_unitary(&op), unitary_test(&to_dense(&op), 1e-9));
    }
}

#[test]
fn closure_is_exhaustive_for_unit_alphabet() {
    // Every self-map of {0..n-1}, n <= 3, with every {0,1} weight assignment,
    // alone and summed with a second such operator.
    let ones = WeightAlphabet::finite(vec![c(1., 0.)]).unwrap();
    let mut all = Vec::new();
    for n in 1..=3usize {
        let maps = n.pow(n as u32);
        for code in 0..maps {
            let image: Vec<usize> = (0..n).map(|k| code / n.pow(k as u32) % n).collect();
            for mask in 0..(1usize << n) {
                let w: Vec<Scalar> = (0..n).map(|b| c(((mask >> b) & 1) as f64, 0.)).collect();
                all.push(WgsOperator::from_parts(image.clone(), w).unwrap());
            }
        }
    }
    for op in &all {
        let r = check_closure(&SumOperator::single(op.clone()), &ones).unwrap();
        assert!(r.closed);
        for other in all.iter().filter(|o| o.n() == op.n()).step_by(5) {
            let s = SumOperator::new(vec![op.clone(), other.clone()]).unwrap();
            assert!(check_closure(&s, &ones).unwrap().closed);
        }
    }
}

#[test]
fn separation_bound_holds_on_annulus_alphabets() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for delta in [0.25, 0.5, 1.0, 3.0] {
        for _ in 0..50 {
            let n = rng.gen_range(1..40);
            let image = (0..n).map(|_| rng.gen_range(0..(n / 3).max(1))).collect();
            let w = (0..n)
                .map(|_| {
                    if rng.gen_bool(0.2) {
                        c(0., 0.)
                    } else {
                        Scalar::from_polar(delta * rng.gen_range(1.0..3.0), rng.gen_range(0.0..6.3))
                    }
                })
                .collect();
            let op = WgsOperator::new(IndexMap::new(image).unwrap(), WeightVector::new(w).unwrap())
                .unwrap();
            let bound = term_bound_from_separation(fiber_norm(&op), delta).unwrap();
            assert!(min_term_count(&op) < bound);
        }
    }
}

#[test]
fn swap_example_agrees_with_dense_matvec() {
    let op = WgsOperator::from_parts(vec![1, 0], vec![c(2., 1.), c(2., -1.)]).unwrap();
    let x = L2Vector::new(vec![c(1., 0.), c(1., 0.)]).unwrap();
    assert_eq!(op.apply(&x).unwrap(), matvec(&to_dense(&op), &x).unwrap());

    let a = WgsOperator::from_parts(vec![1, 0], vec![c(1., 0.), c(0., 0.)]).unwrap();
    let b = WgsOperator::from_parts(vec![1, 0], vec![c(0., 0.), c(1., 0.)]).unwrap();
    let s = SumOperator::new(vec![a, b]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = random_vector(&mut rng, 2).unwrap();
    let expected = matvec(&wgshift_core::oracle::to_dense_sum(&s), &x).unwrap();
    assert_eq!(s.apply(&x).unwrap(), expected);
    assert_eq!(expected.coords(), &[x.get(1), x.get(0)]);
}
