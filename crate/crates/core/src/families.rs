//! Concrete families: diagonal actions, the reflection groups `G(m,p,n)` in
//! their natural and symplectic representations, and the Bazlov-Berenstein
//! parameters.

use std::collections::BTreeMap;

use num_integer::Integer;
use thiserror::Error;

use crate::cyclotomic::CycScalar;
use crate::group::{Group, GroupError, Matrix};
use crate::pbw::KappaMap;
use crate::qalgebra::{add_to, GroupAlgebraElement, QTuple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("invalid family parameters: {0}")]
    InvalidSpec(String),
    #[error("closure produced {found} elements, expected {expected}")]
    OrderMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("the group does not act diagonally on the chosen basis")]
    NotDiagonal,
    #[error("group element {0} is missing from the built group")]
    MissingElement(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Natural,
    Symplectic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReflectionGroupSpec {
    pub m: u32,
    pub p: u32,
    pub n: usize,
    pub representation: Representation,
}

impl ReflectionGroupSpec {
    pub fn natural(m: u32, p: u32, n: usize) -> ReflectionGroupSpec {
        ReflectionGroupSpec {
            m,
            p,
            n,
            representation: Representation::Natural,
        }
    }

    pub fn symplectic(m: u32, n: usize) -> ReflectionGroupSpec {
        ReflectionGroupSpec {
            m,
            p: 1,
            n,
            representation: Representation::Symplectic,
        }
    }

    /// `m^n n! / p`.
    pub fn expected_order(&self) -> usize {
        let fact: usize = (1..=self.n).product();
        (self.m as usize).pow(self.n as u32) * fact / self.p as usize
    }

    /// The field conductor: `lcm(m, 2)`, so that `-1` is available.
    pub fn conductor(&self) -> u32 {
        self.m.lcm(&2)
    }

    fn validate(&self) -> Result<(), FamilyError> {
        if self.m == 0 || self.p == 0 || self.n == 0 {
            return Err(FamilyError::InvalidSpec("m, p, n must be positive".into()));
        }
        if self.m % self.p != 0 {
            return Err(FamilyError::InvalidSpec(format!(
                "p = {} does not divide m = {}",
                self.p, self.m
            )));
        }
        if self.representation == Representation::Symplectic {
            if self.m % 2 != 0 {
                return Err(FamilyError::InvalidSpec("symplectic family needs m even".into()));
            }
            if self.p != 1 {
                return Err(FamilyError::InvalidSpec("symplectic family needs p = 1".into()));
            }
        }
        Ok(())
    }
}

/// A monomial `n x n` generator: `v_j -> zeta_m^{exps[j]} v_{perm[j]}`.
#[derive(Clone, Debug)]
struct MonomialGen {
    perm: Vec<usize>,
    exps: Vec<i64>,
}

impl MonomialGen {
    fn natural(&self, conductor: u32, step: i64) -> Matrix {
        let e: Vec<i64> = self.exps.iter().map(|&x| x * step).collect();
        Matrix::monomial(conductor, &self.perm, &e)
    }

    /// `blockdiag(M, M*)`: `y_j -> zeta^{-e_j} y_{perm[j]}` alongside `x`.
    fn symplectic(&self, conductor: u32, step: i64) -> Matrix {
        let n = self.perm.len();
        let mut perm = self.perm.clone();
        perm.extend(self.perm.iter().map(|&p| p + n));
        let mut e: Vec<i64> = self.exps.iter().map(|&x| x * step).collect();
        e.extend(self.exps.iter().map(|&x| -x * step));
        Matrix::monomial(conductor, &perm, &e)
    }
}

fn reflection_generators(m: u32, p: u32, n: usize) -> Vec<(String, MonomialGen)> {
    let id: Vec<usize> = (0..n).collect();
    let mut gens = Vec::new();
    if p != m {
        let mut exps = vec![0i64; n];
        exps[0] = p as i64;
        gens.push((
            "t".to_string(),
            MonomialGen {
                perm: id.clone(),
                exps,
            },
        ));
    }
    if p > 1 && n >= 2 {
        let mut exps = vec![0i64; n];
        exps[0] = 1;
        exps[1] = -1;
        gens.push((
            "u".to_string(),
            MonomialGen {
                perm: id.clone(),
                exps,
            },
        ));
    }
    for i in 0..n.saturating_sub(1) {
        let mut perm = id.clone();
        perm.swap(i, i + 1);
        gens.push((
            format!("s{}", i + 1),
            MonomialGen {
                perm,
                exps: vec![0; n],
            },
        ));
    }
    gens
}

/// Builds the group and q-tuple of a reflection-group family.
pub fn build_family(spec: &ReflectionGroupSpec) -> Result<(Group, QTuple), FamilyError> {
    spec.validate()?;
    let conductor = spec.conductor();
    let step = (conductor / spec.m) as i64;
    let n = spec.n;
    let gens = reflection_generators(spec.m, spec.p, n);
    let (dim, mats, q) = match spec.representation {
        Representation::Natural => (
            n,
            gens.into_iter()
                .map(|(name, g)| (name, g.natural(conductor, step)))
                .collect::<Vec<_>>(),
            QTuple::minus_one(n, conductor),
        ),
        Representation::Symplectic => (
            2 * n,
            gens.into_iter()
                .map(|(name, g)| (name, g.symplectic(conductor, step)))
                .collect::<Vec<_>>(),
            symplectic_qtuple(n, conductor),
        ),
    };
    let group = Group::generate(dim, conductor, mats, 100_000)?;
    let expected = spec.expected_order();
    if group.order() != expected {
        return Err(FamilyError::OrderMismatch {
            expected,
            found: group.order(),
        });
    }
    Ok((group, q))
}

/// `q_ij = 1` when `i = j mod n`, and `-1` otherwise, on `2n` variables.
pub fn symplectic_qtuple(n: usize, conductor: u32) -> QTuple {
    let half = conductor as i64 / 2;
    QTuple::from_upper_exponents(2 * n, conductor, |i, j| if i % n == j % n { 0 } else { half })
}

/// The eigenvalues `lambda_{g,i}` of a diagonal group, as exponents of `zeta_N`.
#[derive(Clone, Debug)]
pub struct DiagonalAction {
    conductor: u32,
    exps: Vec<Vec<u32>>,
}

impl DiagonalAction {
    pub fn new(group: &Group) -> Result<DiagonalAction, FamilyError> {
        let n = group.dim();
        let mut exps = Vec::with_capacity(group.order());
        for m in group.elements() {
            if !m.is_diagonal() {
                return Err(FamilyError::NotDiagonal);
            }
            let row = (0..n)
                .map(|i| m.get(i, i).root_exponent().ok_or(FamilyError::NotDiagonal))
                .collect::<Result<Vec<_>, _>>()?;
            exps.push(row);
        }
        Ok(DiagonalAction {
            conductor: group.conductor(),
            exps,
        })
    }

    pub fn lambda(&self, g: usize, i: usize) -> CycScalar {
        CycScalar::root_of_unity(self.conductor, self.exps[g][i] as i64)
    }

    /// `k` with `lambda_{g,i} = zeta_N^k`.
    pub fn exp(&self, g: usize, i: usize) -> u32 {
        self.exps[g][i]
    }
}

/// The maps `f_{r,s,a}` spanning the PBW parameters of a diagonal action.
pub fn diagonal_classify(group: &Group, q: &QTuple) -> Result<Vec<KappaMap>, FamilyError> {
    let lam = DiagonalAction::new(group)?;
    let n = q.dim();
    let nn = q.conductor();
    let cd = group.conjugacy_data();
    let mut out = Vec::new();
    for r in 0..n {
        for s in r + 1..n {
            for (c, &a) in cd.representatives.iter().enumerate() {
                let first = (0..n)
                    .filter(|&x| x != r && x != s)
                    .all(|x| (q.exp(r, x) + q.exp(s, x)) % nn == lam.exp(a, x));
                let second = cd.centralizers[c]
                    .iter()
                    .all(|&h| (lam.exp(h, r) + lam.exp(h, s)) % nn == 0);
                if !(first && second) {
                    continue;
                }
                let mut value = GroupAlgebraElement::new();
                for (k, &g) in cd.transversals[c].iter().enumerate() {
                    let e = -((lam.exp(g, r) + lam.exp(g, s)) as i64);
                    add_to(&mut value, cd.classes[c][k], CycScalar::root_of_unity(nn, e));
                }
                let mut kappa = KappaMap::zero(n, nn);
                kappa.set(r, s, value);
                out.push(kappa);
            }
        }
    }
    Ok(out)
}

/// Counts the `G`-invariant basis elements `v^alpha g (x) (v^*)^{^beta}` of
/// Hochschild cohomology in degree `m` with `|alpha| <= poly_cap`.
pub fn diagonal_hh_dim(
    group: &Group,
    q: &QTuple,
    m: usize,
    poly_cap: usize,
) -> Result<usize, FamilyError> {
    let lam = DiagonalAction::new(group)?;
    let n = q.dim();
    let nn = q.conductor() as i64;
    let betas = crate::koszul::KoszulIndex::all(n, m);
    let alphas = crate::deform::monomials_up_to(n, poly_cap);
    let gens = group.generators();
    let mut count = 0;
    for g in 0..group.order() {
        for beta in &betas {
            for alpha in &alphas {
                let gamma: Vec<i64> = (0..n)
                    .map(|i| alpha.exponents()[i] as i64 - beta.0[i] as i64)
                    .collect();
                let in_cg = (0..n).all(|i| {
                    if gamma[i] == -1 {
                        return true;
                    }
                    let e: i64 = (0..n).map(|s| q.exp(i, s) as i64 * gamma[s]).sum();
                    e.rem_euclid(nn) == lam.exp(g, i) as i64
                });
                if !in_cg {
                    continue;
                }
                let invariant = gens.iter().all(|&h| {
                    let e: i64 = (0..n).map(|i| lam.exp(h, i) as i64 * gamma[i]).sum();
                    e.rem_euclid(nn) == 0
                });
                if invariant {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// `sigma_ij^{(eps)}` for `eps = zeta^l`: `x_i -> eps x_j`, `x_j -> -eps^-1 x_i`.
pub fn symplectic_sigma(m: u32, n: usize, i: usize, j: usize, l: i64) -> Matrix {
    let conductor = m.lcm(&2);
    let step = (conductor / m) as i64;
    let half = conductor as i64 / 2;
    let mut perm: Vec<usize> = (0..n).collect();
    perm[i] = j;
    perm[j] = i;
    let mut exps = vec![0i64; n];
    exps[i] = l * step;
    exps[j] = half - l * step;
    MonomialGen {
        perm,
        exps,
    }
    .symplectic(conductor, 1)
}

/// `t_i^{(eps)}` for `eps = zeta^l`.
pub fn symplectic_t(m: u32, n: usize, i: usize, l: i64) -> Matrix {
    let conductor = m.lcm(&2);
    let step = (conductor / m) as i64;
    let mut exps = vec![0i64; n];
    exps[i] = l * step;
    MonomialGen {
        perm: (0..n).collect(),
        exps,
    }
    .symplectic(conductor, 1)
}

fn index(group: &Group, m: &Matrix, name: &str) -> Result<usize, FamilyError> {
    group
        .index_of(m)
        .ok_or_else(|| FamilyError::MissingElement(name.to_string()))
}

/// `f_eps`: `(x_i, y_i) -> t_i^{(eps)}`, every other pair to 0.
pub fn symplectic_f(group: &Group, m: u32, n: usize, l: i64) -> Result<KappaMap, FamilyError> {
    let conductor = m.lcm(&2);
    let mut k = KappaMap::zero(2 * n, conductor);
    for i in 0..n {
        let t = index(group, &symplectic_t(m, n, i, l), "t_i")?;
        k.set(i, n + i, BTreeMap::from([(t, CycScalar::one(conductor))]));
    }
    Ok(k)
}

/// `f~`: `(x_i, y_j) -> sum_eps eps sigma_ij^{(eps)}` for `i != j` and
/// `(x_i, y_i) -> sum_{eps, j != i} sigma_ij^{(eps)}`.
pub fn symplectic_f_tilde(group: &Group, m: u32, n: usize) -> Result<KappaMap, FamilyError> {
    let conductor = m.lcm(&2);
    let step = (conductor / m) as i64;
    let mut k = KappaMap::zero(2 * n, conductor);
    for i in 0..n {
        let mut diag = GroupAlgebraElement::new();
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut cross = GroupAlgebraElement::new();
            for l in 0..m as i64 {
                let s = index(group, &symplectic_sigma(m, n, i, j, l), "sigma_ij")?;
                add_to(&mut cross, s, CycScalar::root_of_unity(conductor, l * step));
                add_to(&mut diag, s, CycScalar::one(conductor));
            }
            k.set(i, n + j, cross);
        }
        k.set(i, n + i, diag);
    }
    Ok(k)
}

/// `kappa = f_1 + c_1 f~ + sum_{eps' in C' \ 1} c_eps' f_eps'`, where `C'`
/// is the subgroup of `m`-th roots of unity of order `cprime_order` and
/// `c[l]` is the coefficient of `eps' = zeta^{l m / cprime_order}`.
pub fn bazlov_berenstein(
    group: &Group,
    m: u32,
    n: usize,
    cprime_order: u32,
    c1: &CycScalar,
    c: &BTreeMap<u32, CycScalar>,
) -> Result<KappaMap, FamilyError> {
    if m % 2 != 0 || n < 3 {
        return Err(FamilyError::InvalidSpec("needs m even and n >= 3".into()));
    }
    if cprime_order == 0 || m % cprime_order != 0 {
        return Err(FamilyError::InvalidSpec(format!(
            "C' of order {cprime_order} is not a subgroup of the {m}-th roots of unity"
        )));
    }
    if let Some(l) = c.keys().find(|&&l| l == 0 || l >= cprime_order) {
        return Err(FamilyError::InvalidSpec(format!(
            "coefficient index {l} is not a nontrivial element of C'"
        )));
    }
    let mut kappa = symplectic_f(group, m, n, 0)?;
    kappa = kappa.plus(&symplectic_f_tilde(group, m, n)?.scale(c1));
    let stride = (m / cprime_order) as i64;
    for (&l, coeff) in c {
        kappa = kappa.plus(&symplectic_f(group, m, n, l as i64 * stride)?.scale(coeff));
    }
    Ok(kappa)
}
