//! The filtered algebra `H_{q,kappa,t}` realized by rewriting in
//! `T(V) # G [t]`, the deformation maps `mu_i`, and checks of the
//! deformation identities.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use dashmap::DashMap;
use smallvec::SmallVec;
use thiserror::Error;

use crate::cyclotomic::CycScalar;
use crate::group::Group;
use crate::linalg::{Echelon, SparseRow};
use crate::par;
use crate::pbw::{ls_check, KappaMap, LsVerdict};
use crate::qalgebra::{add_to, group_word, render_term, skew_multiply, Monomial, QTuple, SkewElement};

#[derive(Debug, Clone, Error)]
pub enum DeformError {
    #[error("kappa fails the PBW conditions ({} violations)", .0.total_violations)]
    PbwPreconditionFailed(LsVerdict),
}

/// A normal-form term `v^alpha * g * t^e`.
pub type FilteredTerm = (Monomial, usize, u32);

/// An element of `S_q(V) # G [t]` written in the PBW basis of the deformation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FilteredElement {
    terms: BTreeMap<FilteredTerm, CycScalar>,
}

impl FilteredElement {
    pub fn zero() -> FilteredElement {
        FilteredElement::default()
    }

    pub fn term(m: Monomial, g: usize, t: u32, c: CycScalar) -> FilteredElement {
        let mut f = FilteredElement::zero();
        f.add_term(m, g, t, c);
        f
    }

    /// Embeds a `t`-free element at `t^0`.
    pub fn from_skew(x: &SkewElement) -> FilteredElement {
        let mut f = FilteredElement::zero();
        for (m, g, c) in x.terms() {
            f.add_term(m.clone(), g, 0, c.clone());
        }
        f
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, usize, u32, &CycScalar)> {
        self.terms.iter().map(|((m, g, t), c)| (m, *g, *t, c))
    }

    pub fn add_term(&mut self, m: Monomial, g: usize, t: u32, c: CycScalar) {
        add_to(&mut self.terms, (m, g, t), c);
    }

    pub fn add_scaled(&mut self, other: &FilteredElement, c: &CycScalar) {
        for ((m, g, t), v) in &other.terms {
            self.add_term(m.clone(), *g, *t, v * c);
        }
    }

    pub fn add(&mut self, other: &FilteredElement) {
        for ((m, g, t), v) in &other.terms {
            self.add_term(m.clone(), *g, *t, v.clone());
        }
    }

    /// Right multiplication by a group element.
    pub fn times_group(&self, h: usize, group: &Group) -> FilteredElement {
        let mut out = FilteredElement::zero();
        for ((m, g, t), v) in &self.terms {
            out.add_term(m.clone(), group.mul(*g, h), *t, v.clone());
        }
        out
    }

    fn shifted(&self, e: u32) -> FilteredElement {
        FilteredElement {
            terms: self
                .terms
                .iter()
                .map(|((m, g, t), c)| ((m.clone(), *g, t + e), c.clone()))
                .collect(),
        }
    }

    /// The coefficient of `t^e`.
    pub fn t_part(&self, e: u32) -> SkewElement {
        let mut out = SkewElement::zero();
        for ((m, g, t), c) in &self.terms {
            if *t == e {
                out.add_term(m.clone(), *g, c.clone());
            }
        }
        out
    }

    pub fn max_t(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.2).max()
    }

    /// Renders as `(c)*v1*v2*word*t^e + ...`.
    pub fn render(&self, group: &Group) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut keys: Vec<&FilteredTerm> = self.terms.keys().collect();
        keys.sort_by(|a, b| (a.2, &a.0, a.1).cmp(&(b.2, &b.0, b.1)));
        keys.into_iter()
            .map(|k| {
                let (m, g, t) = k;
                let tpart = match t {
                    0 => String::new(),
                    1 => "t".to_string(),
                    _ => format!("t^{t}"),
                };
                let tail: Vec<String> = [group_word(group, *g), tpart]
                    .into_iter()
                    .filter(|x| !x.is_empty())
                    .collect();
                render_term(&self.terms[k], &m.render(), &tail.join("*"))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

type Word = SmallVec<[u8; 16]>;

/// Normal forms in `T(V) # G [t]` modulo `v_b v_a = q_ba v_a v_b + t kappa(v_b, v_a)`
/// for `b > a` and `g v = g(v) g`, always rewriting the leftmost descent.
///
/// Normal forms of words are memoized; the rewriter is safe to share
/// between threads.
pub struct Rewriter<'a> {
    group: &'a Group,
    q: &'a QTuple,
    n: usize,
    /// `rules[b][a]` lists `kappa_g(v_b, v_a)` for `b > a`.
    rules: Vec<Vec<Vec<(usize, CycScalar)>>>,
    memo: DashMap<Word, Arc<FilteredElement>>,
}

impl<'a> Rewriter<'a> {
    pub fn new(kappa: &KappaMap, group: &'a Group, q: &'a QTuple) -> Rewriter<'a> {
        let n = q.dim();
        let mut rules = vec![vec![Vec::new(); n]; n];
        for b in 0..n {
            for a in 0..b {
                rules[b][a] = kappa.get(b, a, q).into_iter().collect();
            }
        }
        Rewriter {
            group,
            q,
            n,
            rules,
            memo: DashMap::new(),
        }
    }

    pub fn group(&self) -> &Group {
        self.group
    }

    pub fn qtuple(&self) -> &QTuple {
        self.q
    }

    fn sorted_term(&self, word: &[u8]) -> FilteredElement {
        let mut exps = SmallVec::from_elem(0u16, self.n);
        for &x in word {
            exps[x as usize] += 1;
        }
        FilteredElement::term(Monomial(exps), 0, 0, CycScalar::one(self.q.conductor()))
    }

    /// Expands `g(w)` into a sum of words.
    fn image_words(&self, g: usize, word: &[u8]) -> Vec<(Word, CycScalar)> {
        let mut out: Vec<(Word, CycScalar)> = vec![(Word::new(), CycScalar::one(self.q.conductor()))];
        for &x in word {
            let mut next = Vec::with_capacity(out.len());
            for (w, c) in &out {
                for (y, coeff) in self.group.image(g, x as usize) {
                    let mut w2 = w.clone();
                    w2.push(*y as u8);
                    next.push((w2, c * coeff));
                }
            }
            out = next;
        }
        out
    }

    /// Applies the relation at position `p` (which must be a descent), then
    /// reduces everything to normal form.
    fn rewrite_at(&self, word: &[u8], p: usize) -> FilteredElement {
        let b = word[p] as usize;
        let a = word[p + 1] as usize;
        let mut swapped: Word = Word::from_slice(word);
        swapped.swap(p, p + 1);
        let mut out = self
            .nf_raw(&swapped)
            .as_ref()
            .clone()
            .scale_root_internal(self.q.exp(b, a) as i64);
        for (g, c) in &self.rules[b][a] {
            // prefix * g * suffix = prefix * g(suffix) * g
            for (u, d) in self.image_words(*g, &word[p + 2..]) {
                let mut w: Word = Word::from_slice(&word[..p]);
                w.extend_from_slice(&u);
                let sub = self.nf_raw(&w).times_group(*g, self.group).shifted(1);
                out.add_scaled(&sub, &(c * &d));
            }
        }
        out
    }

    fn nf_raw(&self, word: &[u8]) -> Arc<FilteredElement> {
        let Some(p) = (0..word.len().saturating_sub(1)).find(|&p| word[p] > word[p + 1]) else {
            return Arc::new(self.sorted_term(word));
        };
        if let Some(v) = self.memo.get(word).map(|r| r.clone()) {
            return v;
        }
        let result = Arc::new(self.rewrite_at(word, p));
        self.memo.insert(Word::from_slice(word), result.clone());
        result
    }

    /// Normal form of the word `v_{w_0} v_{w_1} ...`.
    pub fn nf_word(&self, word: &[usize]) -> FilteredElement {
        let w: Word = word.iter().map(|&x| x as u8).collect();
        self.nf_raw(&w).as_ref().clone()
    }

    /// Normal form of `g(v_{w_0} v_{w_1} ...)`, without the trailing `g`.
    pub fn nf_image_word(&self, g: usize, word: &[usize]) -> FilteredElement {
        let w: Word = word.iter().map(|&x| x as u8).collect();
        let mut out = FilteredElement::zero();
        for (u, c) in self.image_words(g, &w) {
            out.add_scaled(&self.nf_raw(&u), &c);
        }
        out
    }

    /// One rewrite at position `p` of `word`, then normal form.
    pub fn resolve_overlap(&self, word: &[usize], p: usize) -> FilteredElement {
        let w: Word = word.iter().map(|&x| x as u8).collect();
        self.rewrite_at(&w, p)
    }

    /// Product of two normal-form elements.
    pub fn multiply(&self, x: &FilteredElement, y: &FilteredElement) -> FilteredElement {
        let mut out = FilteredElement::zero();
        for ((a, g, e), c) in &x.terms {
            let wa: Word = a.word().into_iter().map(|v| v as u8).collect();
            for ((b, h, f), d) in &y.terms {
                let wb: Word = b.word().into_iter().map(|v| v as u8).collect();
                let gh = self.group.mul(*g, *h);
                let cd = c * d;
                for (u, coeff) in self.image_words(*g, &wb) {
                    let mut w = wa.clone();
                    w.extend_from_slice(&u);
                    let nf = self.nf_raw(&w).times_group(gh, self.group).shifted(e + f);
                    out.add_scaled(&nf, &(&cd * &coeff));
                }
            }
        }
        out
    }
}

impl FilteredElement {
    fn scale_root_internal(self, k: i64) -> FilteredElement {
        if k == 0 {
            return self;
        }
        FilteredElement {
            terms: self
                .terms
                .into_iter()
                .map(|(key, c)| (key, c.mul_root(k)))
                .collect(),
        }
    }
}

/// `H_{q,kappa,t}` for a kappa that passes the PBW conditions.
pub struct HeckeAlgebra<'a> {
    rw: Rewriter<'a>,
}

impl<'a> HeckeAlgebra<'a> {
    pub fn new(kappa: &KappaMap, group: &'a Group, q: &'a QTuple) -> Result<HeckeAlgebra<'a>, DeformError> {
        let verdict = ls_check(kappa, group, q);
        if !verdict.passed() {
            return Err(DeformError::PbwPreconditionFailed(verdict));
        }
        Ok(HeckeAlgebra {
            rw: Rewriter::new(kappa, group, q),
        })
    }

    pub fn multiply(&self, x: &FilteredElement, y: &FilteredElement) -> FilteredElement {
        self.rw.multiply(x, y)
    }

    /// `mu_i(r (x) s)`: the `t^i` coefficient of `r * s`.
    pub fn mu(&self, i: u32, r: &SkewElement, s: &SkewElement) -> SkewElement {
        self.multiply(&FilteredElement::from_skew(r), &FilteredElement::from_skew(s))
            .t_part(i)
    }

    pub fn rewriter(&self) -> &Rewriter<'a> {
        &self.rw
    }
}

pub fn h_multiply(
    x: &FilteredElement,
    y: &FilteredElement,
    kappa: &KappaMap,
    group: &Group,
    q: &QTuple,
) -> Result<FilteredElement, DeformError> {
    Ok(HeckeAlgebra::new(kappa, group, q)?.multiply(x, y))
}

pub fn extract_mu(
    i: u32,
    r: &SkewElement,
    s: &SkewElement,
    kappa: &KappaMap,
    group: &Group,
    q: &QTuple,
) -> Result<SkewElement, DeformError> {
    Ok(HeckeAlgebra::new(kappa, group, q)?.mu(i, r, s))
}

/// A basis element `v^alpha g` of `S_q(V) # G`.
pub type BasisElement = (Monomial, usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeformationLaw {
    Associativity,
    Cocycle,
    Degree,
}

#[derive(Clone, Debug)]
pub struct DeformationFailure {
    pub law: DeformationLaw,
    pub elements: Vec<BasisElement>,
}

#[derive(Clone, Debug)]
pub struct DeformationReport {
    pub triples_checked: usize,
    pub pairs_checked: usize,
    /// Group elements that were allowed in basis elements.
    pub group_scope: Vec<usize>,
    pub failure: Option<DeformationFailure>,
}

impl DeformationReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// All monomials in `n` variables of degree at most `cap`.
pub fn monomials_up_to(n: usize, cap: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u16; n];
    fn rec(i: usize, left: usize, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if i == cur.len() {
            out.push(Monomial::from_exponents(cur));
            return;
        }
        for a in 0..=left {
            cur[i] = a as u16;
            rec(i + 1, left - a, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, cap, &mut cur, &mut out);
    out.sort_by_key(|m| (m.degree(), m.clone()));
    out
}

/// Group elements used in basis triples: the whole group when it has at
/// most six elements, otherwise the identity and the generators.
pub fn deformation_group_scope(group: &Group) -> Vec<usize> {
    if group.order() <= 6 {
        return (0..group.order()).collect();
    }
    let mut s = vec![0];
    for &g in group.generators() {
        if !s.contains(&g) {
            s.push(g);
        }
    }
    s
}

/// Checks associativity, the `mu_1` cocycle identity and the degree law
/// `deg mu_i(r (x) s) = deg r + deg s - 2i` on basis triples.
pub fn check_deformation_laws(
    kappa: &KappaMap,
    group: &Group,
    q: &QTuple,
    degree_cap: usize,
) -> Result<DeformationReport, DeformError> {
    let alg = HeckeAlgebra::new(kappa, group, q)?;
    let n = q.dim();
    let one = CycScalar::one(q.conductor());
    let scope = deformation_group_scope(group);
    let monos = monomials_up_to(n, degree_cap);
    let basis: Vec<BasisElement> = monos
        .iter()
        .flat_map(|m| scope.iter().map(move |&g| (m.clone(), g)))
        .collect();
    let elem = |b: &BasisElement| SkewElement::term(b.0.clone(), b.1, one.clone());
    let products: DashMap<(usize, usize), FilteredElement> = DashMap::new();
    let product = |i: usize, j: usize| -> FilteredElement {
        if let Some(v) = products.get(&(i, j)) {
            return v.clone();
        }
        let p = alg.multiply(
            &FilteredElement::from_skew(&elem(&basis[i])),
            &FilteredElement::from_skew(&elem(&basis[j])),
        );
        products.insert((i, j), p.clone());
        p
    };

    // degree law on pairs
    let pair_list: Vec<(usize, usize)> = (0..basis.len())
        .flat_map(|i| (0..basis.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| basis[i].0.degree() + basis[j].0.degree() <= degree_cap)
        .collect();
    let degree_failure = par::map(&pair_list, |&(i, j)| {
        let target = basis[i].0.degree() + basis[j].0.degree();
        let p = product(i, j);
        let ok = p
            .terms()
            .all(|(m, _, t, _)| m.degree() + 2 * t as usize == target);
        (!ok).then(|| vec![basis[i].clone(), basis[j].clone()])
    })
    .into_iter()
    .flatten()
    .next();
    if let Some(elements) = degree_failure {
        return Ok(DeformationReport {
            triples_checked: 0,
            pairs_checked: pair_list.len(),
            group_scope: scope,
            failure: Some(DeformationFailure {
                law: DeformationLaw::Degree,
                elements,
            }),
        });
    }

    let mut triples = Vec::new();
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            let dij = basis[i].0.degree() + basis[j].0.degree();
            if dij > degree_cap {
                continue;
            }
            for k in 0..basis.len() {
                if dij + basis[k].0.degree() <= degree_cap {
                    triples.push((i, j, k));
                }
            }
        }
    }
    let mu1 = |x: &SkewElement, y: &SkewElement| alg.mu(1, x, y);
    let failure = par::map(&triples, |&(i, j, k)| {
        let rs = product(i, j);
        let su = product(j, k);
        let u = FilteredElement::from_skew(&elem(&basis[k]));
        let r = FilteredElement::from_skew(&elem(&basis[i]));
        let left = alg.multiply(&rs, &u);
        let right = alg.multiply(&r, &su);
        let witness = || vec![basis[i].clone(), basis[j].clone(), basis[k].clone()];
        if left != right {
            return Some(DeformationFailure {
                law: DeformationLaw::Associativity,
                elements: witness(),
            });
        }
        // mu1(r,s)u + mu1(rs,u) = mu1(r,su) + r mu1(s,u), products taken in S_q(V) # G
        let (er, eu) = (elem(&basis[i]), elem(&basis[k]));
        let rs0 = rs.t_part(0);
        let su0 = su.t_part(0);
        let mut lhs = skew_multiply(&rs.t_part(1), &eu, q, group);
        lhs.add(&mu1(&rs0, &eu));
        let mut rhs = mu1(&er, &su0);
        rhs.add(&skew_multiply(&er, &su.t_part(1), q, group));
        if lhs != rhs {
            return Some(DeformationFailure {
                law: DeformationLaw::Cocycle,
                elements: witness(),
            });
        }
        None
    })
    .into_iter()
    .flatten()
    .next();
    Ok(DeformationReport {
        triples_checked: triples.len(),
        pairs_checked: pair_list.len(),
        group_scope: scope,
        failure,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedDegree {
    pub degree: usize,
    /// Dimension of the degree-`degree` part of `S_q(V) # G [t]`.
    pub expected: usize,
    /// Dimension of the same graded piece of the deformation.
    pub actual: usize,
}

#[derive(Clone, Debug)]
pub struct GradedReport {
    pub degrees: Vec<GradedDegree>,
    pub first_deficient: Option<usize>,
}

impl GradedReport {
    pub fn passed(&self) -> bool {
        self.first_deficient.is_none()
    }
}

fn binomial(n: usize, k: usize) -> usize {
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as usize
}

fn words_of_length(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..n).map(move |x| {
                    let mut w2 = w.clone();
                    w2.push(x);
                    w2
                })
            })
            .collect();
    }
    out
}

/// Compares graded dimensions of the deformation (with `t` of degree 2)
/// against `S_q(V) # G [t]` in each degree up to `d`.
///
/// The ideal in degree `D` is spanned by `u g(r_ba) w` with `|u| + |w| = D - 2`;
/// normal words form a complement of it exactly when every such element
/// reduces to zero, so the deficiency in degree `D` is the rank of their
/// normal forms (plus the `t`-multiples of lower deficiencies).
pub fn graded_dimension_check(kappa: &KappaMap, group: &Group, q: &QTuple, d: usize) -> GradedReport {
    let n = q.dim();
    let order = group.order();
    let rw = Rewriter::new(kappa, group, q);
    let mut ranks = vec![0usize; d + 1];
    for k in 2..=d {
        let mut jobs = Vec::new();
        for ul in 0..=k - 2 {
            for u in words_of_length(n, ul) {
                for w in words_of_length(n, k - 2 - ul) {
                    for g in 0..order {
                        for b in 0..n {
                            for a in 0..b {
                                jobs.push((u.clone(), w.clone(), g, b, a));
                            }
                        }
                    }
                }
            }
        }
        let forms = par::map(&jobs, |(u, w, g, b, a)| ideal_element_nf(&rw, kappa, u, w, *g, *b, *a));
        let nonzero: Vec<FilteredElement> = forms.into_iter().filter(|f| !f.is_zero()).collect();
        if !nonzero.is_empty() {
            let mut columns: HashMap<FilteredTerm, usize> = HashMap::new();
            let mut e = Echelon::new();
            for f in nonzero {
                let mut row = SparseRow::new();
                for (m, h, t, c) in f.terms() {
                    let next = columns.len();
                    let col = *columns.entry((m.clone(), h, t)).or_insert(next);
                    row.insert(col, c.clone());
                }
                e.insert(row);
            }
            ranks[k] = e.rank();
        }
    }
    let mut degrees = Vec::new();
    let mut first_deficient = None;
    for deg in 0..=d {
        let mut expected = 0;
        let mut deficiency = 0;
        let mut e = 0;
        while 2 * e <= deg {
            let k = deg - 2 * e;
            expected += binomial(k + n - 1, n - 1) * order;
            deficiency += ranks[k];
            e += 1;
        }
        let actual = expected - deficiency.min(expected);
        if actual != expected && first_deficient.is_none() {
            first_deficient = Some(deg);
        }
        degrees.push(GradedDegree {
            degree: deg,
            expected,
            actual,
        });
    }
    GradedReport {
        degrees,
        first_deficient,
    }
}

/// Normal form of `u g(r_ba) w`, where
/// `g(r_ba) = g(v_b) g(v_a) - q_ba g(v_a) g(v_b) - t g kappa(v_b, v_a) g^-1`.
fn ideal_element_nf(
    rw: &Rewriter<'_>,
    kappa: &KappaMap,
    u: &[usize],
    w: &[usize],
    g: usize,
    b: usize,
    a: usize,
) -> FilteredElement {
    let group = rw.group();
    let q = rw.qtuple();
    let mut out = FilteredElement::zero();
    let qba = q.get(b, a);
    for (x, cx) in group.image(g, b) {
        for (y, cy) in group.image(g, a) {
            let c = cx * cy;
            let mut w1 = u.to_vec();
            w1.extend([*x, *y]);
            w1.extend_from_slice(w);
            out.add_scaled(&rw.nf_word(&w1), &c);
            let mut w2 = u.to_vec();
            w2.extend([*y, *x]);
            w2.extend_from_slice(w);
            out.add_scaled(&rw.nf_word(&w2), &-(qba * &c));
        }
    }
    for (h, c) in kappa.get(b, a, q) {
        let k = group.conjugate(g, h);
        // u k w = u k(w) k
        for (iw, ic) in image_words_usize(rw, k, w) {
            let mut full = u.to_vec();
            full.extend(iw);
            let nf = rw.nf_word(&full).times_group(k, group).shifted(1);
            out.add_scaled(&nf, &-(&c * &ic));
        }
    }
    out
}

fn image_words_usize(rw: &Rewriter<'_>, g: usize, word: &[usize]) -> Vec<(Vec<usize>, CycScalar)> {
    let w: Word = word.iter().map(|&x| x as u8).collect();
    rw.image_words(g, &w)
        .into_iter()
        .map(|(u, c)| (u.into_iter().map(|x| x as usize).collect(), c))
        .collect()
}
