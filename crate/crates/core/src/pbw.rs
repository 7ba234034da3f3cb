//! PBW criteria for `H_{q,kappa}`: the Levandovskyy-Shepler conditions and
//! an independent overlap-resolution check by rewriting.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::cyclotomic::CycScalar;
use crate::deform::{FilteredElement, Rewriter};
use crate::group::{Group, Matrix};
use crate::koszul::ConstantCochain;
use crate::par;
use crate::qalgebra::{add_to, GroupAlgebraElement, Monomial, QTuple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PbwError {
    #[error("kappa is not quantum antisymmetric at g = {g}, (v{i}, v{j})", i = .i + 1, j = .j + 1)]
    AntisymmetryViolation { g: usize, i: usize, j: usize },
    #[error("index out of range in kappa: ({i}, {j})")]
    IndexOutOfRange { i: usize, j: usize },
}

/// A bilinear map `kappa: V x V -> CG`, stored on pairs `i < j` and
/// extended by `kappa(v_i, v_j) = -q_ij kappa(v_j, v_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaMap {
    n: usize,
    conductor: u32,
    values: BTreeMap<(usize, usize), GroupAlgebraElement>,
}

impl KappaMap {
    pub fn zero(n: usize, conductor: u32) -> KappaMap {
        KappaMap {
            n,
            conductor,
            values: BTreeMap::new(),
        }
    }

    /// Builds a map from values on ordered pairs. Pairs with `i > j` are
    /// converted by antisymmetry; a pair given both ways must agree.
    pub fn from_pairs(
        q: &QTuple,
        entries: impl IntoIterator<Item = ((usize, usize), GroupAlgebraElement)>,
    ) -> Result<KappaMap, PbwError> {
        let n = q.dim();
        let mut given: BTreeMap<(usize, usize), GroupAlgebraElement> = BTreeMap::new();
        for ((i, j), v) in entries {
            if i >= n || j >= n {
                return Err(PbwError::IndexOutOfRange { i, j });
            }
            let slot = given.entry((i, j)).or_default();
            for (g, c) in v {
                add_to(slot, g, c);
            }
        }
        let mut k = KappaMap::zero(n, q.conductor());
        for (&(i, j), v) in &given {
            if i == j {
                if let Some((&g, _)) = v.iter().next() {
                    return Err(PbwError::AntisymmetryViolation { g, i, j });
                }
                continue;
            }
            if i < j {
                k.set(i, j, v.clone());
            }
        }
        for (&(i, j), v) in &given {
            if i > j {
                // kappa(v_i, v_j) = -q_ij kappa(v_j, v_i)
                let factor = -(q.get(j, i).clone());
                let mut conv = GroupAlgebraElement::new();
                for (&g, c) in v {
                    add_to(&mut conv, g, &factor * c);
                }
                match given.get(&(j, i)) {
                    Some(existing) => {
                        if *existing != conv {
                            let g = conv
                                .keys()
                                .chain(existing.keys())
                                .find(|g| conv.get(g) != existing.get(g))
                                .copied()
                                .unwrap_or(0);
                            return Err(PbwError::AntisymmetryViolation { g, i, j });
                        }
                    }
                    None => k.set(j, i, conv),
                }
            }
        }
        Ok(k)
    }

    /// `kappa_g(v_i, v_j) = alpha^g_ij` for `i < j`.
    pub fn from_cochain(c: &ConstantCochain, n: usize, conductor: u32) -> KappaMap {
        let mut k = KappaMap::zero(n, conductor);
        for (g, r, s, a) in c.iter() {
            let slot = k.values.entry((r, s)).or_default();
            add_to(slot, g, a.clone());
        }
        k.values.retain(|_, v| !v.is_empty());
        k
    }

    pub fn to_cochain(&self) -> ConstantCochain {
        let mut c = ConstantCochain::new();
        for (&(i, j), v) in &self.values {
            for (&g, a) in v {
                c.add(g, i, j, a.clone());
            }
        }
        c
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// Sets `kappa(v_i, v_j)` for `i < j`.
    pub fn set(&mut self, i: usize, j: usize, v: GroupAlgebraElement) {
        assert!(i < j, "kappa is stored on pairs i < j");
        let v: GroupAlgebraElement = v.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if v.is_empty() {
            self.values.remove(&(i, j));
        } else {
            self.values.insert((i, j), v);
        }
    }

    /// Stored values on pairs `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), &GroupAlgebraElement)> {
        self.values.iter().map(|(&k, v)| (k, v))
    }

    /// `kappa(v_i, v_j)` for any ordered pair.
    pub fn get(&self, i: usize, j: usize, q: &QTuple) -> GroupAlgebraElement {
        if i == j {
            return GroupAlgebraElement::new();
        }
        if i < j {
            return self.values.get(&(i, j)).cloned().unwrap_or_default();
        }
        let factor = -(q.get(i, j).clone());
        let mut out = GroupAlgebraElement::new();
        if let Some(v) = self.values.get(&(j, i)) {
            for (&g, c) in v {
                add_to(&mut out, g, &factor * c);
            }
        }
        out
    }

    /// The scalar `kappa_g(v_i, v_j)`.
    pub fn kappa_g(&self, g: usize, i: usize, j: usize, q: &QTuple) -> CycScalar {
        if i == j {
            return CycScalar::zero(self.conductor);
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let v = self
            .values
            .get(&(a, b))
            .and_then(|m| m.get(&g))
            .cloned()
            .unwrap_or_else(|| CycScalar::zero(self.conductor));
        if i < j {
            v
        } else {
            -(q.get(i, j) * &v)
        }
    }

    pub fn support(&self) -> BTreeSet<usize> {
        self.values.values().flat_map(|v| v.keys().copied()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn plus(&self, other: &KappaMap) -> KappaMap {
        let mut out = self.clone();
        for (&(i, j), v) in &other.values {
            let slot = out.values.entry((i, j)).or_default();
            for (&g, c) in v {
                add_to(slot, g, c.clone());
            }
        }
        out.values.retain(|_, v| !v.is_empty());
        out
    }

    pub fn scale(&self, c: &CycScalar) -> KappaMap {
        let mut out = KappaMap::zero(self.n, self.conductor);
        for (&(i, j), v) in &self.values {
            out.set(i, j, v.iter().map(|(&g, a)| (g, a * c)).collect());
        }
        out
    }

    /// The map as a point of `CG (x) Lambda^2`, in a fixed coordinate list.
    pub fn to_vector(&self, keys: &[(usize, usize, usize)]) -> Vec<CycScalar> {
        self.to_cochain().to_vector(keys, self.conductor)
    }
}

/// `ddet_ijkl(h) = h^j_l h^i_k - q_ji h^i_l h^j_k`.
pub fn quantum_minor_det(
    h: &Matrix,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
    q: &QTuple,
) -> CycScalar {
    let a = h.get(l, j) * h.get(k, i);
    let b = h.get(l, i) * h.get(k, j);
    if b.is_zero() {
        a
    } else {
        a - q.get(j, i) * &b
    }
}

/// Which of the two conditions failed, and where.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LsWitness {
    /// Condition (i) fails for `g` and `i < j < k`.
    Overlap { g: usize, i: usize, j: usize, k: usize },
    /// Condition (ii) fails for generator position `h`, element `g`, pair `i < j`.
    Conjugation { h: usize, g: usize, i: usize, j: usize },
}

#[derive(Clone, Debug, Default)]
pub struct LsVerdict {
    pub violations: Vec<LsWitness>,
    pub total_violations: usize,
}

impl LsVerdict {
    pub fn passed(&self) -> bool {
        self.total_violations == 0
    }

    fn record(&mut self, w: LsWitness) {
        self.total_violations += 1;
        if self.violations.len() < 16 {
            self.violations.push(w);
        }
    }
}

/// Condition (i) residual as a dense linear form over `v_0..v_{n-1}`.
fn condition_i_form(
    kappa: &KappaMap,
    group: &Group,
    q: &QTuple,
    g: usize,
    i: usize,
    j: usize,
    k: usize,
) -> Vec<CycScalar> {
    let n = q.dim();
    let conductor = q.conductor();
    let m = group.element(g);
    let mut form = vec![CycScalar::zero(conductor); n];
    let mut add_term = |coef: &CycScalar, x: usize, plain: CycScalar, image: CycScalar| {
        // coef * (plain * v_x + image * g v_x)
        if coef.is_zero() {
            return;
        }
        form[x] += &(coef * &plain);
        for t in 0..n {
            let gx = m.get(t, x);
            if !gx.is_zero() {
                form[t] += &(&(coef * &image) * gx);
            }
        }
    };
    let one = CycScalar::one(conductor);
    // (q_ki q_kj gv_k - v_k) kappa_g(v_j, v_i)
    add_term(
        &kappa.kappa_g(g, j, i, q),
        k,
        -one.clone(),
        q.get(k, i) * q.get(k, j),
    );
    // (q_kj v_j - q_ji gv_j) kappa_g(v_k, v_i)
    add_term(
        &kappa.kappa_g(g, k, i, q),
        j,
        q.get(k, j).clone(),
        -(q.get(j, i).clone()),
    );
    // (gv_i - q_ji q_ki v_i) kappa_g(v_k, v_j)
    add_term(
        &kappa.kappa_g(g, k, j, q),
        i,
        -(q.get(j, i) * q.get(k, i)),
        one,
    );
    form
}

/// The Levandovskyy-Shepler criteria, with condition (ii) over generators.
pub fn ls_check(kappa: &KappaMap, group: &Group, q: &QTuple) -> LsVerdict {
    let n = q.dim();
    let mut verdict = LsVerdict::default();
    let support: Vec<usize> = kappa.support().into_iter().collect();
    let cond_i = par::map(&support, |&g| {
        let mut bad = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let f = condition_i_form(kappa, group, q, g, i, j, k);
                    if f.iter().any(|x| !x.is_zero()) {
                        bad.push(LsWitness::Overlap { g, i, j, k });
                    }
                }
            }
        }
        bad
    });
    for w in cond_i.into_iter().flatten() {
        verdict.record(w);
    }
    for (pos, &h) in group.generators().iter().enumerate() {
        let hm = group.element(h);
        let hinv = group.inverse(h);
        let mut elements: BTreeSet<usize> = support.iter().copied().collect();
        for &s in &support {
            // g with h^-1 g h = s
            elements.insert(group.mul(group.mul(h, s), hinv));
        }
        for &g in &elements {
            let conj = group.mul(group.mul(hinv, g), h);
            for i in 0..n {
                for j in i + 1..n {
                    let lhs = kappa.kappa_g(conj, j, i, q);
                    let mut rhs = CycScalar::zero(q.conductor());
                    for k in 0..n {
                        for l in k + 1..n {
                            let kv = kappa.kappa_g(g, l, k, q);
                            if kv.is_zero() {
                                continue;
                            }
                            let d = quantum_minor_det(hm, i, j, k, l, q);
                            if !d.is_zero() {
                                rhs += &(&d * &kv);
                            }
                        }
                    }
                    if lhs != rhs {
                        verdict.record(LsWitness::Conjugation { h: pos, g, i, j });
                    }
                }
            }
        }
    }
    verdict
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiamondWitness {
    /// The overlap `v_k v_j v_i` (`k > j > i`) resolves to two different forms.
    Overlap { k: usize, j: usize, i: usize },
    /// `h (v_j v_i)` resolves differently through the two rules.
    Conjugation { h: usize, j: usize, i: usize },
}

#[derive(Clone, Debug, Default)]
pub struct DiamondVerdict {
    pub failures: Vec<DiamondWitness>,
}

impl DiamondVerdict {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Resolves every cubic overlap and every generator-conjugation overlap of
/// the rewriting system `v_j v_i -> q_ji v_i v_j + t kappa(v_j, v_i)`,
/// `g v -> g(v) g`.
pub fn diamond_check(kappa: &KappaMap, group: &Group, q: &QTuple) -> DiamondVerdict {
    let n = q.dim();
    let rw = Rewriter::new(kappa, group, q);
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                triples.push((k, j, i));
            }
        }
    }
    let mut failures: Vec<DiamondWitness> = par::map(&triples, |&(k, j, i)| {
        let a = rw.resolve_overlap(&[k, j, i], 0);
        let b = rw.resolve_overlap(&[k, j, i], 1);
        (a != b).then_some(DiamondWitness::Overlap { k, j, i })
    })
    .into_iter()
    .flatten()
    .collect();
    for (pos, &h) in group.generators().iter().enumerate() {
        for i in 0..n {
            for j in i + 1..n {
                // h v_j v_i: move h across first, or apply the relation first
                let mut first = rw.nf_image_word(h, &[j, i]);
                first = first.times_group(h, group);
                let mut second = rw.nf_image_word(h, &[i, j]);
                second = second.times_group(h, group).scale_root(q.exp(j, i) as i64);
                for (g, c) in kappa.get(j, i, q) {
                    second.add_term(Monomial::one(n), group.mul(h, g), 1, c);
                }
                if first != second {
                    failures.push(DiamondWitness::Conjugation { h: pos, j, i });
                }
            }
        }
    }
    DiamondVerdict { failures }
}

impl FilteredElement {
    pub(crate) fn scale_root(&self, k: i64) -> FilteredElement {
        let mut out = FilteredElement::zero();
        for (m, g, t, c) in self.terms() {
            out.add_term(m.clone(), g, t, c.mul_root(k));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minor_determinants() {
        let q = QTuple::from_upper_exponents(3, 5, |_, _| 1);
        let id = Matrix::identity(3, 5);
        assert!(quantum_minor_det(&id, 0, 1, 0, 1, &q).is_one());
        assert!(quantum_minor_det(&id, 0, 1, 0, 2, &q).is_zero());
        let swap = Matrix::monomial(5, &[1, 0, 2], &[0, 0, 0]);
        assert_eq!(quantum_minor_det(&swap, 0, 1, 0, 1, &q), -(q.get(1, 0).clone()));
    }

    #[test]
    fn antisymmetric_extension() {
        let q = QTuple::from_upper_exponents(2, 3, |_, _| 1);
        let mut v = GroupAlgebraElement::new();
        v.insert(0, CycScalar::one(3));
        let k = KappaMap::from_pairs(&q, [((1, 0), v.clone())]).unwrap();
        // kappa(v1, v2) = -q12 kappa(v2, v1)
        assert_eq!(k.kappa_g(0, 0, 1, &q), -(q.get(0, 1).clone()));
        assert_eq!(k.kappa_g(0, 1, 0, &q), CycScalar::one(3));
        let bad = KappaMap::from_pairs(&q, [((1, 0), v.clone()), ((0, 1), v.clone())]);
        assert!(matches!(bad, Err(PbwError::AntisymmetryViolation { .. })));
        let diag = KappaMap::from_pairs(&q, [((1, 1), v)]);
        assert!(matches!(diag, Err(PbwError::AntisymmetryViolation { .. })));
    }
}
