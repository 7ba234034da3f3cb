//! Closed-form kappa maps for the natural reflection-group families, built
//! directly from permutations and sign matrices.

#![allow(dead_code)]

use std::collections::BTreeMap;

use qdha_core::cyclotomic::CycScalar;
use qdha_core::group::{Group, Matrix};
use qdha_core::pbw::KappaMap;
use qdha_core::qalgebra::{GroupAlgebraElement, QTuple};

/// Index of `zeta^{scaled} sigma`, where `sigma` sends `v_x` to `v_{perm[x]}`
/// and the result is scaled by `zeta` in the coordinates listed in `scaled`.
pub fn element(group: &Group, perm: &[usize], scaled: &[usize], step: i64) -> usize {
    let exps: Vec<i64> = perm
        .iter()
        .map(|p| if scaled.contains(p) { step } else { 0 })
        .collect();
    group
        .index_of(&Matrix::monomial(group.conductor(), perm, &exps))
        .expect("element of the family")
}

pub fn transposition(n: usize, i: usize, j: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.swap(i, j);
    p
}

/// `i -> j -> k -> i`.
pub fn three_cycle(n: usize, i: usize, j: usize, k: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p[i] = j;
    p[j] = k;
    p[k] = i;
    p
}

pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x]).collect()
}

fn add(el: &mut GroupAlgebraElement, g: usize, c: i64, conductor: u32) {
    let e = el.entry(g).or_insert_with(|| CycScalar::zero(conductor));
    *e += &CycScalar::from_int(conductor, c);
    if e.is_zero() {
        el.remove(&g);
    }
}

fn from_rule(q: &QTuple, n: usize, rule: impl Fn(usize, usize) -> Vec<(usize, i64)>) -> KappaMap {
    let conductor = q.conductor();
    let mut entries = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut v = BTreeMap::new();
            for (g, c) in rule(i, j) {
                add(&mut v, g, c, conductor);
            }
            entries.push(((i, j), v));
        }
    }
    KappaMap::from_pairs(q, entries).unwrap()
}

/// The five symmetric-group maps, in the order
/// `1`, `(ij)`, `sum (ik)+(jk)`, `sum (ik)(jl)`, `sum (ijk)+(ikj)`.
pub fn symmetric_maps(group: &Group, q: &QTuple, n: usize) -> Vec<KappaMap> {
    let el = |p: Vec<usize>| element(group, &p, &[], 0);
    let others = |i: usize, j: usize| (0..n).filter(move |&k| k != i && k != j);
    vec![
        from_rule(q, n, |_, _| vec![(0, 1)]),
        from_rule(q, n, |i, j| vec![(el(transposition(n, i, j)), 1)]),
        from_rule(q, n, |i, j| {
            others(i, j)
                .flat_map(|k| [(el(transposition(n, i, k)), 1), (el(transposition(n, j, k)), 1)])
                .collect()
        }),
        from_rule(q, n, |i, j| {
            let mut out = Vec::new();
            for k in others(i, j) {
                for l in others(i, j) {
                    if k != l {
                        out.push((el(compose(&transposition(n, i, k), &transposition(n, j, l))), 1));
                    }
                }
            }
            out
        }),
        from_rule(q, n, |i, j| {
            others(i, j)
                .flat_map(|k| [(el(three_cycle(n, i, j, k)), 1), (el(three_cycle(n, i, k, j)), 1)])
                .collect()
        }),
    ]
}

/// For `m = 2`: the constant part `-(ij) + zeta_i zeta_j (ij)` and the
/// three-cycle map.
pub fn sign_maps(group: &Group, q: &QTuple, n: usize) -> Vec<KappaMap> {
    let step = group.conductor() as i64 / 2;
    let el = |p: &[usize], s: &[usize]| element(group, p, s, step);
    vec![
        from_rule(q, n, |i, j| {
            let t = transposition(n, i, j);
            vec![(el(&t, &[]), -1), (el(&t, &[i, j]), 1)]
        }),
        from_rule(q, n, |i, j| {
            let mut out = Vec::new();
            for k in (0..n).filter(|&k| k != i && k != j) {
                let a = three_cycle(n, i, j, k);
                let b = three_cycle(n, i, k, j);
                out.extend([
                    (el(&a, &[]), 1),
                    (el(&a, &[i, j]), -1),
                    (el(&a, &[j, k]), -1),
                    (el(&a, &[i, k]), 1),
                    (el(&b, &[]), 1),
                    (el(&b, &[i, j]), -1),
                    (el(&b, &[j, k]), 1),
                    (el(&b, &[i, k]), -1),
                ]);
            }
            out
        }),
    ]
}

/// Coordinates `(g, i, j)` for all `g` and `i < j`.
pub fn keys(group: &Group, n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for g in 0..group.order() {
        for i in 0..n {
            for j in i + 1..n {
                out.push((g, i, j));
            }
        }
    }
    out
}

pub fn vectors(maps: &[KappaMap], keys: &[(usize, usize, usize)]) -> Vec<Vec<CycScalar>> {
    maps.iter().map(|k| k.to_vector(keys)).collect()
}

/// Rank of a list of maps.
pub fn rank(maps: &[KappaMap], keys: &[(usize, usize, usize)]) -> usize {
    qdha_core::linalg::rank(
        vectors(maps, keys)
            .iter()
            .map(|v| qdha_core::linalg::dense_to_sparse(v)),
    )
}
