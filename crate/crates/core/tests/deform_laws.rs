use std::collections::BTreeMap;

use proptest::prelude::*;
use qdha_core::cyclotomic::CycScalar;
use qdha_core::deform::{
    check_deformation_laws, extract_mu, graded_dimension_check, h_multiply, DeformError,
    FilteredElement, HeckeAlgebra,
};
use qdha_core::families::{build_family, ReflectionGroupSpec};
use qdha_core::group::{Group, Matrix};
use qdha_core::koszul::solve_constant_cocycles;
use qdha_core::pbw::KappaMap;
use qdha_core::qalgebra::{skew_multiply, Monomial, QTuple, SkewElement};
use qdha_core::sampling::{random_group, random_kappa, InstanceRng, KappaKind, SeedableRng};
use rand::Rng;

fn cyclic_example() -> (Group, QTuple, KappaMap) {
    let g = Group::generate(3, 3, vec![("g".into(), Matrix::diagonal_roots(3, &[1, 2, 0]))], 10).unwrap();
    let q = QTuple::from_upper_exponents(3, 3, |i, j| match (i, j) {
        (0, 1) | (1, 2) => 2,
        _ => 1,
    });
    let gen = g.generator_by_name("g").unwrap();
    let kappa = KappaMap::from_pairs(&q, [((0, 1), BTreeMap::from([(gen, CycScalar::one(3))]))]).unwrap();
    (g, q, kappa)
}

fn var(n: usize, i: usize, conductor: u32) -> SkewElement {
    SkewElement::term(Monomial::var(n, i), 0, CycScalar::one(conductor))
}

fn random_basis_element(rng: &mut InstanceRng, g: &Group, q: &QTuple, cap: u16) -> SkewElement {
    let e: Vec<u16> = (0..q.dim()).map(|_| rng.gen_range(0..=cap)).collect();
    SkewElement::term(Monomial::from_exponents(&e), rng.gen_range(0..g.order()), CycScalar::one(q.conductor()))
}

#[test]
fn zero_kappa_is_the_skew_product() {
    let mut rng = InstanceRng::seed_from_u64(3);
    for s in 0..10 {
        let (_, g, q) = random_group(&mut InstanceRng::seed_from_u64(s));
        let k = KappaMap::zero(q.dim(), q.conductor());
        let x = random_basis_element(&mut rng, &g, &q, 2);
        let y = random_basis_element(&mut rng, &g, &q, 2);
        let p = h_multiply(&FilteredElement::from_skew(&x), &FilteredElement::from_skew(&y), &k, &g, &q).unwrap();
        assert_eq!(p, FilteredElement::from_skew(&skew_multiply(&x, &y, &q, &g)));
    }
}

#[test]
fn cyclic_example_relation() {
    let (g, q, k) = cyclic_example();
    let gen = g.generator_by_name("g").unwrap();
    let z = CycScalar::root_of_unity(3, 1);
    let (v1, v2) = (var(3, 0, 3), var(3, 1, 3));
    let p = h_multiply(&FilteredElement::from_skew(&v2), &FilteredElement::from_skew(&v1), &k, &g, &q).unwrap();
    let mut expected = FilteredElement::zero();
    expected.add_term(Monomial::from_exponents(&[1, 1, 0]), 0, 0, z.clone());
    expected.add_term(Monomial::one(3), gen, 1, -z.clone());
    assert_eq!(p, expected);
    assert_eq!(
        extract_mu(1, &v2, &v1, &k, &g, &q).unwrap(),
        SkewElement::group(3, gen, -z.clone())
    );
    assert!(extract_mu(1, &v1, &v2, &k, &g, &q).unwrap().is_zero());
    assert_eq!(extract_mu(0, &v2, &v1, &k, &g, &q).unwrap(), skew_multiply(&v2, &v1, &q, &g));
}

#[test]
fn failing_kappa_is_rejected() {
    let g = Group::trivial(3, 4);
    let q = QTuple::from_upper_exponents(3, 4, |i, j| if (i, j) == (0, 2) { 1 } else { 0 });
    let k = KappaMap::from_pairs(&q, [((0, 1), BTreeMap::from([(0, CycScalar::one(4))]))]).unwrap();
    assert!(matches!(HeckeAlgebra::new(&k, &g, &q), Err(DeformError::PbwPreconditionFailed(_))));
}

#[test]
fn laws_hold_for_listed_examples() {
    let (g, q, k) = cyclic_example();
    let r = check_deformation_laws(&k, &g, &q, 4).unwrap();
    assert!(r.passed(), "{:?}", r.failure);
    assert!(r.triples_checked > 0);
    assert!(graded_dimension_check(&k, &g, &q, 4).passed());

    let z = KappaMap::zero(3, 3);
    assert!(check_deformation_laws(&z, &g, &q, 3).unwrap().passed());
    assert!(graded_dimension_check(&z, &g, &q, 4).passed());

    // (v_i, v_j) -> 1 on S4
    let (g, q) = build_family(&ReflectionGroupSpec::natural(1, 1, 4)).unwrap();
    let entries = (0..4).flat_map(|i| (i + 1..4).map(move |j| ((i, j), BTreeMap::from([(0, CycScalar::one(2))]))));
    let k = KappaMap::from_pairs(&q, entries).unwrap();
    let r = check_deformation_laws(&k, &g, &q, 3).unwrap();
    assert!(r.passed(), "{:?}", r.failure);
}

#[test]
fn reassociation_in_cyclic_example() {
    let (g, q, k) = cyclic_example();
    let alg = HeckeAlgebra::new(&k, &g, &q).unwrap();
    let (v1, v2) = (
        FilteredElement::from_skew(&var(3, 0, 3)),
        FilteredElement::from_skew(&var(3, 1, 3)),
    );
    let left = alg.multiply(&alg.multiply(&v2, &v1), &v1);
    let right = alg.multiply(&v2, &alg.multiply(&v1, &v1));
    assert_eq!(left, right);
}

#[test]
fn solver_bases_satisfy_laws() {
    for s in 0..12 {
        let (label, g, q) = random_group(&mut InstanceRng::seed_from_u64(s));
        for c in solve_constant_cocycles(&g, &q).unwrap().basis {
            let k = KappaMap::from_cochain(&c, q.dim(), q.conductor());
            let r = check_deformation_laws(&k, &g, &q, 3).unwrap();
            assert!(r.passed(), "{label}: {:?}", r.failure);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn product_is_the_sum_of_its_t_coefficients(seed in any::<u64>()) {
        let mut rng = InstanceRng::seed_from_u64(seed);
        let (_, g, q) = random_group(&mut rng);
        let k = random_kappa(&mut rng, &g, &q, KappaKind::Combination);
        let alg = HeckeAlgebra::new(&k, &g, &q).unwrap();
        let x = random_basis_element(&mut rng, &g, &q, 2);
        let y = random_basis_element(&mut rng, &g, &q, 2);
        let p = alg.multiply(&FilteredElement::from_skew(&x), &FilteredElement::from_skew(&y));
        let mut rebuilt = FilteredElement::zero();
        for i in 0..=p.max_t().unwrap_or(0) {
            for (m, h, c) in alg.mu(i, &x, &y).terms() {
                rebuilt.add_term(m.clone(), h, i, c.clone());
            }
        }
        prop_assert_eq!(rebuilt, p);
    }

    #[test]
    fn rewriting_mu1_matches_averaged_mu1(seed in any::<u64>()) {
        let (_, g, q) = random_group(&mut InstanceRng::seed_from_u64(seed));
        let n = q.dim();
        for c in solve_constant_cocycles(&g, &q).unwrap().basis {
            let k = KappaMap::from_cochain(&c, n, q.conductor());
            let avg = qdha_core::koszul::mu1_on_generators(&c, &g, &q).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let vi = var(n, i, q.conductor());
                    let vj = var(n, j, q.conductor());
                    let mut lhs = extract_mu(1, &vj, &vi, &k, &g, &q).unwrap();
                    lhs.sub(&extract_mu(1, &vi, &vj, &k, &g, &q).unwrap().scale(q.get(j, i)));
                    let mut rhs = SkewElement::zero();
                    for (h, v) in &avg[j][i] {
                        rhs.add_term(Monomial::one(n), *h, v.clone());
                    }
                    for (h, v) in &avg[i][j] {
                        rhs.add_term(Monomial::one(n), *h, -(q.get(j, i) * v));
                    }
                    prop_assert_eq!(lhs, rhs);
                }
            }
        }
    }
}
