//! Seeded random instances for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::cyclotomic::CycScalar;
use crate::families::{build_family, ReflectionGroupSpec};
use crate::group::{Group, Matrix};
use crate::koszul::solve_constant_cocycles;
use crate::pbw::KappaMap;
use crate::qalgebra::{add_to, GroupAlgebraElement, QTuple};

pub use rand::SeedableRng;

pub type InstanceRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KappaKind {
    Sparse,
    Combination,
    Perturbed,
    Zero,
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub label: String,
    pub group: Group,
    pub q: QTuple,
    pub kappa: KappaMap,
    pub kind: KappaKind,
}

/// A group with a compatible q-tuple; `|G| <= 24`, `n <= 3`.
pub fn random_group(rng: &mut InstanceRng) -> (String, Group, QTuple) {
    match rng.gen_range(0..4) {
        0 => {
            let n = rng.gen_range(2..=3);
            let nn = *[2u32, 3, 4, 6].choose(rng).unwrap();
            let exps: Vec<i64> = (0..n).map(|_| rng.gen_range(0..nn as i64)).collect();
            let table: Vec<i64> = (0..n * n).map(|_| rng.gen_range(0..nn as i64)).collect();
            let q = QTuple::from_upper_exponents(n, nn, |i, j| table[i * n + j]);
            let g = Group::generate(
                n,
                nn,
                vec![("g".into(), Matrix::diagonal_roots(nn, &exps))],
                64,
            )
            .expect("cyclic diagonal group");
            (format!("diagonal cyclic N={nn} n={n}"), g, q)
        }
        1 => {
            let nn = *[2u32, 3, 4, 6].choose(rng).unwrap();
            let c = rng.gen_range(0..nn as i64);
            // q12 = q23 = q31 = c
            let q = QTuple::from_upper_exponents(3, nn, |i, j| if (i, j) == (0, 2) { -c } else { c });
            let g = Group::generate(
                3,
                nn,
                vec![("r".into(), Matrix::monomial(nn, &[1, 2, 0], &[0, 0, 0]))],
                64,
            )
            .expect("cyclic permutation group");
            (format!("3-cycle c=z^{c} N={nn}"), g, q)
        }
        2 => {
            let n = rng.gen_range(2..=3);
            let spec = ReflectionGroupSpec::natural(1, 1, n);
            let (g, q) = build_family(&spec).expect("symmetric group");
            if rng.gen_bool(0.5) {
                (format!("S{n} q=-1"), g, q)
            } else {
                (format!("S{n} q=1"), g, QTuple::trivial(n, 2))
            }
        }
        _ => {
            let (m, p, n) = *[(2, 1, 2), (3, 1, 2), (2, 2, 2), (3, 3, 2), (4, 4, 2), (4, 2, 2), (6, 6, 2), (6, 3, 2), (2, 2, 3)]
                .choose(rng)
                .unwrap();
            let spec = ReflectionGroupSpec::natural(m, p, n);
            let (g, q) = build_family(&spec).expect("reflection group");
            if rng.gen_bool(0.7) {
                (format!("G({m},{p},{n}) q=-1"), g, q)
            } else {
                let nn = spec.conductor();
                (format!("G({m},{p},{n}) q=1"), g, QTuple::trivial(n, nn))
            }
        }
    }
}

fn random_scalar(rng: &mut InstanceRng, conductor: u32) -> CycScalar {
    let c = loop {
        let c = rng.gen_range(-2i64..=2);
        if c != 0 {
            break c;
        }
    };
    let k = rng.gen_range(0..conductor as i64);
    CycScalar::root_of_unity(conductor, k).scale(&num_rational::BigRational::from_integer(c.into()))
}

/// A sparse `kappa` with one or two group terms on a random set of pairs.
pub fn random_sparse_kappa(rng: &mut InstanceRng, group: &Group, q: &QTuple) -> KappaMap {
    let n = q.dim();
    let nn = q.conductor();
    let mut kappa = KappaMap::zero(n, nn);
    for i in 0..n {
        for j in i + 1..n {
            if !rng.gen_bool(0.6) {
                continue;
            }
            let mut v = GroupAlgebraElement::new();
            for _ in 0..rng.gen_range(1..=2) {
                let g = rng.gen_range(0..group.order());
                add_to(&mut v, g, random_scalar(rng, nn));
            }
            kappa.set(i, j, v);
        }
    }
    kappa
}

/// A random integer combination of the constant cocycle basis.
pub fn random_combination(rng: &mut InstanceRng, group: &Group, q: &QTuple) -> KappaMap {
    let n = q.dim();
    let nn = q.conductor();
    let basis = solve_constant_cocycles(group, q).expect("valid instance").basis;
    let mut kappa = KappaMap::zero(n, nn);
    for b in &basis {
        let c = rng.gen_range(-2i64..=2);
        if c == 0 {
            continue;
        }
        kappa = kappa.plus(&KappaMap::from_cochain(b, n, nn).scale(&CycScalar::from_int(nn, c)));
    }
    kappa
}

pub fn random_kappa(
    rng: &mut InstanceRng,
    group: &Group,
    q: &QTuple,
    kind: KappaKind,
) -> KappaMap {
    match kind {
        KappaKind::Sparse => random_sparse_kappa(rng, group, q),
        KappaKind::Combination => random_combination(rng, group, q),
        KappaKind::Perturbed => {
            random_combination(rng, group, q).plus(&random_sparse_kappa(rng, group, q))
        }
        KappaKind::Zero => KappaMap::zero(q.dim(), q.conductor()),
    }
}

pub fn random_instance(rng: &mut InstanceRng) -> Instance {
    let (label, group, q) = random_group(rng);
    let kind = *[KappaKind::Sparse, KappaKind::Combination, KappaKind::Perturbed, KappaKind::Zero]
        .choose(rng)
        .unwrap();
    let kappa = random_kappa(rng, &group, &q, kind);
    Instance {
        label,
        group,
        q,
        kappa,
        kind,
    }
}

pub fn instance_from_seed(seed: u64) -> Instance {
    random_instance(&mut InstanceRng::seed_from_u64(seed))
}
