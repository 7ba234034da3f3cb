//! Quantum symmetric and exterior algebras and the skew group algebra
//! `S_q(V) # G`, in normal form.

use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;
use thiserror::Error;

use crate::cyclotomic::CycScalar;
use crate::group::Group;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QTupleError {
    #[error("q tuple needs a square table of size {n}x{n}")]
    Shape { n: usize },
    #[error("q_{i}{i} must be 1", i = .0 + 1)]
    DiagonalNotOne(usize),
    #[error("q_{j}{i} must be the inverse of q_{i}{j}", i = .0 + 1, j = .1 + 1)]
    NotInverse(usize, usize),
    #[error("q_{i}{j} is not a root of unity of order dividing the conductor", i = .0 + 1, j = .1 + 1)]
    NotRootOfUnity(usize, usize),
}

/// The parameters `q_ij` of `S_q(V)`, each a power of the field's `zeta_N`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QTuple {
    n: usize,
    conductor: u32,
    exps: Vec<u32>,
    values: Vec<CycScalar>,
}

impl QTuple {
    /// Validates a full `n x n` table (row-major).
    pub fn new(n: usize, conductor: u32, table: Vec<CycScalar>) -> Result<QTuple, QTupleError> {
        if table.len() != n * n {
            return Err(QTupleError::Shape { n });
        }
        let mut exps = vec![0u32; n * n];
        for i in 0..n {
            if !table[i * n + i].is_one() {
                return Err(QTupleError::DiagonalNotOne(i));
            }
            for j in 0..n {
                let k = table[i * n + j]
                    .root_exponent()
                    .ok_or(QTupleError::NotRootOfUnity(i, j))?;
                exps[i * n + j] = k;
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if (exps[i * n + j] + exps[j * n + i]) % conductor != 0 {
                    return Err(QTupleError::NotInverse(i, j));
                }
            }
        }
        Ok(QTuple {
            n,
            conductor,
            exps,
            values: table,
        })
    }

    /// Builds the tuple from exponents `q_ij = zeta_N^{e(i,j)}` for `i < j`.
    pub fn from_upper_exponents(n: usize, conductor: u32, e: impl Fn(usize, usize) -> i64) -> QTuple {
        let mut exps = vec![0u32; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let k = e(i, j).rem_euclid(conductor as i64) as u32;
                exps[i * n + j] = k;
                exps[j * n + i] = (conductor - k) % conductor;
            }
        }
        QTuple::from_exps(n, conductor, exps)
    }

    fn from_exps(n: usize, conductor: u32, exps: Vec<u32>) -> QTuple {
        let values = exps
            .iter()
            .map(|&k| CycScalar::root_of_unity(conductor, k as i64))
            .collect();
        QTuple {
            n,
            conductor,
            exps,
            values,
        }
    }

    /// All `q_ij = 1`.
    pub fn trivial(n: usize, conductor: u32) -> QTuple {
        QTuple::from_upper_exponents(n, conductor, |_, _| 0)
    }

    /// `q_ij = -1` for `i != j`; the conductor must be even.
    pub fn minus_one(n: usize, conductor: u32) -> QTuple {
        assert!(conductor % 2 == 0, "-1 needs an even conductor");
        QTuple::from_upper_exponents(n, conductor, |_, _| conductor as i64 / 2)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn get(&self, i: usize, j: usize) -> &CycScalar {
        &self.values[i * self.n + j]
    }

    /// `k` with `q_ij = zeta_N^k`.
    pub fn exp(&self, i: usize, j: usize) -> u32 {
        self.exps[i * self.n + j]
    }

    /// The tuple `q^{-1}`, i.e. the transpose.
    pub fn inverse(&self) -> QTuple {
        let n = self.n;
        let exps = (0..n * n).map(|k| self.exps[(k % n) * n + k / n]).collect();
        QTuple::from_exps(n, self.conductor, exps)
    }
}

/// Exponent vector `alpha` of `v^alpha = v_1^{alpha_1} ... v_n^{alpha_n}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial(pub SmallVec<[u16; 8]>);

impl Monomial {
    pub fn one(n: usize) -> Monomial {
        Monomial(SmallVec::from_elem(0, n))
    }

    pub fn var(n: usize, i: usize) -> Monomial {
        let mut m = Monomial::one(n);
        m.0[i] = 1;
        m
    }

    pub fn from_exponents(e: &[u16]) -> Monomial {
        Monomial(SmallVec::from_slice(e))
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&a| a as usize).sum()
    }

    /// The sorted word `1^{a_1} 2^{a_2} ...` as variable indices.
    pub fn word(&self) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.degree());
        for (i, &a) in self.0.iter().enumerate() {
            for _ in 0..a {
                w.push(i);
            }
        }
        w
    }

    /// Product in `S_q(V)`: `v^a v^b = zeta^k v^{a+b}` with
    /// `k = sum_{s>t} a_s b_t e(q_st)`.
    pub fn mul(&self, other: &Monomial, q: &QTuple) -> (u32, Monomial) {
        let n = self.0.len();
        let mut k: u64 = 0;
        for s in 0..n {
            let a = self.0[s] as u64;
            if a == 0 {
                continue;
            }
            for t in 0..s {
                let b = other.0[t] as u64;
                if b != 0 {
                    k += a * b * q.exp(s, t) as u64;
                }
            }
        }
        let mut e = self.0.clone();
        for (x, y) in e.iter_mut().zip(other.0.iter()) {
            *x += *y;
        }
        ((k % q.conductor() as u64) as u32, Monomial(e))
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (i, &a) in self.0.iter().enumerate() {
            match a {
                0 => {}
                1 => parts.push(format!("v{}", i + 1)),
                _ => parts.push(format!("v{}^{}", i + 1, a)),
            }
        }
        parts.join("*")
    }
}

/// Sorts a word ascending in `S_q(V)`, returning the accumulated scalar.
pub fn sq_normalize(word: &[usize], q: &QTuple) -> (CycScalar, Monomial) {
    let n = q.dim();
    let mut counts = vec![0u16; n];
    let mut k: u64 = 0;
    for &w in word {
        counts[w] += 1;
    }
    // each letter w passes every later letter u < w once
    let mut seen = vec![0u64; n];
    for &w in word.iter().rev() {
        for u in 0..w {
            k += seen[u] * q.exp(w, u) as u64;
        }
        seen[w] += 1;
    }
    let k = (k % q.conductor() as u64) as i64;
    (
        CycScalar::root_of_unity(q.conductor(), k),
        Monomial(SmallVec::from_vec(counts)),
    )
}

/// Sorts a wedge word in `Lambda_q(V)` using `v_i ^ v_j = -q_ij v_j ^ v_i`;
/// `None` when a variable repeats.
pub fn wedge_normalize(word: &[usize], q: &QTuple) -> Option<(CycScalar, Monomial)> {
    let n = q.dim();
    let mut counts = vec![0u16; n];
    for &w in word {
        counts[w] += 1;
        if counts[w] > 1 {
            return None;
        }
    }
    let (scalar, m) = sq_normalize(word, q);
    let mut swaps = 0usize;
    for (a, &x) in word.iter().enumerate() {
        for &y in &word[a + 1..] {
            if x > y {
                swaps += 1;
            }
        }
    }
    let scalar = if swaps % 2 == 1 { -scalar } else { scalar };
    Some((scalar, m))
}

/// An element of `S_q(V)`.
pub type Poly = BTreeMap<Monomial, CycScalar>;

/// An element of the group algebra, keyed by element index.
pub type GroupAlgebraElement = BTreeMap<usize, CycScalar>;

pub(crate) fn add_to<K: Ord>(map: &mut BTreeMap<K, CycScalar>, key: K, value: CycScalar) {
    if value.is_zero() {
        return;
    }
    match map.entry(key) {
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += &value;
            if e.get().is_zero() {
                e.remove();
            }
        }
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(value);
        }
    }
}

/// `g(v^alpha)` expanded in `S_q(V)`.
pub fn act_on_monomial(group: &Group, g: usize, mono: &Monomial, q: &QTuple) -> Poly {
    let n = mono.dim();
    let conductor = q.conductor();
    let mut poly: Poly = BTreeMap::new();
    poly.insert(Monomial::one(n), CycScalar::one(conductor));
    for i in mono.word() {
        let mut next: Poly = BTreeMap::new();
        for (m, c) in &poly {
            for (k, coeff) in group.image(g, i) {
                let (e, prod) = m.mul(&Monomial::var(n, *k), q);
                add_to(&mut next, prod, (c * coeff).mul_root(e as i64));
            }
        }
        poly = next;
    }
    poly
}

/// An element of `S_q(V) # G`: a sum of `c * v^alpha * g`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SkewElement {
    terms: BTreeMap<(Monomial, usize), CycScalar>,
}

impl SkewElement {
    pub fn zero() -> SkewElement {
        SkewElement::default()
    }

    pub fn term(mono: Monomial, g: usize, c: CycScalar) -> SkewElement {
        let mut s = SkewElement::zero();
        s.add_term(mono, g, c);
        s
    }

    /// `c * g` with no polynomial part.
    pub fn group(n: usize, g: usize, c: CycScalar) -> SkewElement {
        SkewElement::term(Monomial::one(n), g, c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, usize, &CycScalar)> {
        self.terms.iter().map(|((m, g), c)| (m, *g, c))
    }

    pub fn add_term(&mut self, mono: Monomial, g: usize, c: CycScalar) {
        add_to(&mut self.terms, (mono, g), c);
    }

    pub fn add(&mut self, other: &SkewElement) {
        for ((m, g), c) in &other.terms {
            self.add_term(m.clone(), *g, c.clone());
        }
    }

    pub fn sub(&mut self, other: &SkewElement) {
        for ((m, g), c) in &other.terms {
            self.add_term(m.clone(), *g, -c);
        }
    }

    pub fn scale(&self, c: &CycScalar) -> SkewElement {
        let mut out = SkewElement::zero();
        for ((m, g), v) in &self.terms {
            out.add_term(m.clone(), *g, v * c);
        }
        out
    }

    /// Degrees of the monomials that occur.
    pub fn degrees(&self) -> std::collections::BTreeSet<usize> {
        self.terms.keys().map(|(m, _)| m.degree()).collect()
    }

    /// Renders as `c*v1^2*v3*word + ...` using shortest generator words.
    pub fn render(&self, group: &Group) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|((m, g), c)| render_term(c, &m.render(), &group_word(group, *g)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

pub(crate) fn group_word(group: &Group, g: usize) -> String {
    if g == 0 {
        String::new()
    } else {
        group.word_string(g)
    }
}

/// One rendered term `(c)*mono*word`; a unit coefficient is left out.
pub(crate) fn render_term(c: &CycScalar, mono: &str, word: &str) -> String {
    let mut parts = Vec::new();
    if !c.is_one() || (mono.is_empty() && word.is_empty()) {
        parts.push(format!("({c})"));
    }
    if !mono.is_empty() {
        parts.push(mono.to_string());
    }
    if !word.is_empty() {
        parts.push(word.to_string());
    }
    parts.join("*")
}

/// `(a g)(b h) = a g(b) gh`, extended bilinearly.
pub fn skew_multiply(x: &SkewElement, y: &SkewElement, q: &QTuple, group: &Group) -> SkewElement {
    let mut out = SkewElement::zero();
    for ((a, g), c) in &x.terms {
        for ((b, h), d) in &y.terms {
            let gh = group.mul(*g, *h);
            let cd = c * d;
            for (bm, e) in act_on_monomial(group, *g, b, q) {
                let (k, prod) = a.mul(&bm, q);
                out.add_term(prod, gh, (&cd * &e).mul_root(k as i64));
            }
        }
    }
    out
}

/// `g(a h) = g(a) g h g^-1`.
pub fn group_act(group: &Group, g: usize, x: &SkewElement, q: &QTuple) -> SkewElement {
    let mut out = SkewElement::zero();
    for ((a, h), c) in &x.terms {
        let conj = group.conjugate(g, *h);
        for (m, e) in act_on_monomial(group, g, a, q) {
            out.add_term(m, conj, c * &e);
        }
    }
    out
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.render();
        if r.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&r)
        }
    }
}
