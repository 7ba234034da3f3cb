//! The quantum Koszul complex of `S_q(V)`: differentials, the constant part
//! of the degree-3 dual differential, and the constant 2-cocycle solver.

use std::collections::{BTreeMap, HashMap, VecDeque};

use smallvec::SmallVec;
use thiserror::Error;

use crate::cyclotomic::CycScalar;
use crate::group::{check_exterior_extension, check_q_action, ActionReport, Group, Matrix};
use crate::linalg::{dense_to_sparse, Echelon};
use crate::par;
use crate::qalgebra::{add_to, GroupAlgebraElement, Monomial, QTuple};

#[derive(Debug, Clone, Error)]
pub enum KoszulError {
    #[error("the group does not act on S_q(V) ({} violations)", .0.total_violations)]
    ActionFailed(ActionReport),
    #[error("the action does not extend to the quantum exterior algebra ({} violations)", .0.total_violations)]
    ExteriorFailed(ActionReport),
}

/// A 0/1 multi-index `beta` naming the wedge `v^{^beta}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct KoszulIndex(pub SmallVec<[u8; 8]>);

impl KoszulIndex {
    pub fn from_set(n: usize, set: &[usize]) -> KoszulIndex {
        let mut b = SmallVec::from_elem(0u8, n);
        for &i in set {
            b[i] = 1;
        }
        KoszulIndex(b)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&b| b as usize).sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] == 1).collect()
    }

    /// All indices of degree `m` in `n` variables, lexicographically by support.
    pub fn all(n: usize, m: usize) -> Vec<KoszulIndex> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(n: usize, m: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<KoszulIndex>) {
            if cur.len() == m {
                out.push(KoszulIndex::from_set(n, cur));
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(n, m, i + 1, cur, out);
                cur.pop();
            }
        }
        rec(n, m, 0, &mut cur, &mut out);
        out
    }
}

/// One summand `sign * (left v_i (x) 1 - right 1 (x) v_i) (x) v^{^(beta - [i])}`.
#[derive(Clone, Debug)]
pub struct DiffTerm {
    pub sign: i8,
    pub left: CycScalar,
    pub right: CycScalar,
    pub var: usize,
    pub target: KoszulIndex,
}

/// `d_m(1 (x) 1 (x) v^{^beta})` for every `beta` of degree `m`.
pub fn koszul_d(m: usize, q: &QTuple) -> Vec<(KoszulIndex, Vec<DiffTerm>)> {
    let n = q.dim();
    let conductor = q.conductor();
    KoszulIndex::all(n, m)
        .into_iter()
        .map(|beta| {
            let mut terms = Vec::new();
            for i in beta.support() {
                let before = (0..i).filter(|&s| beta.0[s] == 1).count();
                let mut le: i64 = 0;
                let mut re: i64 = 0;
                for s in 0..n {
                    if beta.0[s] == 1 {
                        if s <= i {
                            le += q.exp(s, i) as i64;
                        }
                        if s >= i {
                            re += q.exp(i, s) as i64;
                        }
                    }
                }
                let mut target = beta.clone();
                target.0[i] = 0;
                terms.push(DiffTerm {
                    sign: if before % 2 == 0 { 1 } else { -1 },
                    left: CycScalar::root_of_unity(conductor, le),
                    right: CycScalar::root_of_unity(conductor, re),
                    var: i,
                    target,
                });
            }
            (beta, terms)
        })
        .collect()
}

type Enveloping = BTreeMap<(Monomial, Monomial), CycScalar>;

/// `d_{m-1} d_m` on every basis wedge of degree `m`; empty when the
/// composite vanishes. Keys are `(source, target)` wedges.
pub fn d_squared(m: usize, q: &QTuple) -> BTreeMap<(KoszulIndex, KoszulIndex), Enveloping> {
    let n = q.dim();
    let lower: HashMap<KoszulIndex, Vec<DiffTerm>> = koszul_d(m - 1, q).into_iter().collect();
    let mut out = BTreeMap::new();
    // an A^e coefficient l (x) r acting on a (x) b gives l a (x) b r
    let pieces = |t: &DiffTerm| -> Vec<(Monomial, Monomial, CycScalar)> {
        let s = CycScalar::from_int(q.conductor(), t.sign as i64);
        vec![
            (Monomial::var(n, t.var), Monomial::one(n), &s * &t.left),
            (Monomial::one(n), Monomial::var(n, t.var), -(&s * &t.right)),
        ]
    };
    for (beta, terms) in koszul_d(m, q) {
        for t in &terms {
            if m == 1 {
                continue;
            }
            for u in &lower[&t.target] {
                for (l1, r1, c1) in pieces(t) {
                    for (l2, r2, c2) in pieces(u) {
                        let (el, l) = l1.mul(&l2, q);
                        let (er, r) = r2.mul(&r1, q);
                        let c = (&c1 * &c2).mul_root(el as i64 + er as i64);
                        let entry: &mut Enveloping =
                            out.entry((beta.clone(), u.target.clone())).or_default();
                        add_to(entry, (l, r), c);
                    }
                }
            }
        }
    }
    out.retain(|_, v: &mut Enveloping| !v.is_empty());
    out
}

/// Constant cochain `sum alpha^g_rs g (x) v_r^* ^ v_s^*` with `r < s`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ConstantCochain {
    alpha: BTreeMap<(usize, usize, usize), CycScalar>,
}

impl ConstantCochain {
    pub fn new() -> ConstantCochain {
        ConstantCochain::default()
    }

    pub fn get(&self, g: usize, r: usize, s: usize) -> Option<&CycScalar> {
        self.alpha.get(&(g, r, s))
    }

    /// Adds `c` to `alpha^g_rs`; `r < s` is required.
    pub fn add(&mut self, g: usize, r: usize, s: usize, c: CycScalar) {
        assert!(r < s, "cochain keys need r < s");
        add_to(&mut self.alpha, (g, r, s), c);
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, usize, &CycScalar)> {
        self.alpha.iter().map(|(&(g, r, s), c)| (g, r, s, c))
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn support(&self) -> std::collections::BTreeSet<usize> {
        self.alpha.keys().map(|k| k.0).collect()
    }

    pub fn scale(&self, c: &CycScalar) -> ConstantCochain {
        let mut out = ConstantCochain::new();
        for (&(g, r, s), v) in &self.alpha {
            out.add(g, r, s, v * c);
        }
        out
    }

    pub fn plus(&self, other: &ConstantCochain) -> ConstantCochain {
        let mut out = self.clone();
        for (&(g, r, s), v) in &other.alpha {
            out.add(g, r, s, v.clone());
        }
        out
    }

    /// Coordinates in a fixed key list, for span comparisons.
    pub fn to_vector(&self, keys: &[(usize, usize, usize)], conductor: u32) -> Vec<CycScalar> {
        keys.iter()
            .map(|k| {
                self.alpha
                    .get(k)
                    .cloned()
                    .unwrap_or_else(|| CycScalar::zero(conductor))
            })
            .collect()
    }
}

/// Positions of the unordered pairs `r < s` in lexicographic order.
pub fn pair_list(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for r in 0..n {
        for s in r + 1..n {
            out.push((r, s));
        }
    }
    out
}

fn pair_index(n: usize, r: usize, s: usize) -> usize {
    // number of pairs with first entry < r, plus offset
    r * (2 * n - r - 1) / 2 + (s - r - 1)
}

/// The three linear forms multiplying `alpha^g_jk`, `alpha^g_ik`, `alpha^g_ij`
/// in the constant part of `d_3^*` on the wedge `i < j < k`; each form is a
/// dense coefficient vector over `v_0..v_{n-1}`.
pub fn d3_forms(
    m: &Matrix,
    q: &QTuple,
    triple: [usize; 3],
) -> [((usize, usize), Vec<CycScalar>); 3] {
    let n = q.dim();
    let conductor = q.conductor();
    let make = |x: usize, pair: (usize, usize)| -> ((usize, usize), Vec<CycScalar>) {
        let (a, b) = pair;
        let before = [a, b].iter().filter(|&&s| s < x).count();
        let mut le: i64 = 0;
        let mut re: i64 = 0;
        for s in [a, b] {
            if s < x {
                le += q.exp(s, x) as i64;
            } else {
                re += q.exp(x, s) as i64;
            }
        }
        let left = CycScalar::root_of_unity(conductor, le);
        let right = CycScalar::root_of_unity(conductor, re);
        let mut form = vec![CycScalar::zero(conductor); n];
        form[x] = left;
        for t in 0..n {
            let gx = m.get(t, x);
            if !gx.is_zero() {
                form[t] -= &(&right * gx);
            }
        }
        if before % 2 == 1 {
            for f in form.iter_mut() {
                *f = -std::mem::replace(f, CycScalar::zero(conductor));
            }
        }
        (pair, form)
    };
    let [i, j, k] = triple;
    [make(i, (j, k)), make(j, (i, k)), make(k, (i, j))]
}

/// Constant part of `d_3^*(alpha)`: for each group element and wedge
/// `i < j < k`, the degree-one coefficient as a dense linear form.
pub fn d3_star_constant(
    c: &ConstantCochain,
    group: &Group,
    q: &QTuple,
) -> BTreeMap<(usize, [usize; 3]), Vec<CycScalar>> {
    let n = q.dim();
    let conductor = q.conductor();
    let mut out: BTreeMap<(usize, [usize; 3]), Vec<CycScalar>> = BTreeMap::new();
    for g in c.support() {
        let m = group.element(g);
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut total = vec![CycScalar::zero(conductor); n];
                    for ((r, s), form) in d3_forms(m, q, [i, j, k]) {
                        if let Some(a) = c.get(g, r, s) {
                            for (t, f) in total.iter_mut().zip(&form) {
                                *t += &(a * f);
                            }
                        }
                    }
                    if total.iter().any(|x| !x.is_zero()) {
                        out.insert((g, [i, j, k]), total);
                    }
                }
            }
        }
    }
    out
}

/// The invariance matrix `T_h[(ij),(kl)] = h^i_k h^j_l - q_lk h^i_l h^j_k`,
/// acting by `alpha^{h^-1 g h} = T_h alpha^g`.
pub fn invariance_matrix(h: &Matrix, q: &QTuple) -> Vec<Vec<CycScalar>> {
    let pairs = pair_list(q.dim());
    pairs
        .iter()
        .map(|&(i, j)| {
            pairs
                .iter()
                .map(|&(k, l)| {
                    let a = h.get(k, i) * h.get(l, j);
                    let b = h.get(l, i) * h.get(k, j);
                    if b.is_zero() {
                        a
                    } else {
                        a - q.get(l, k) * &b
                    }
                })
                .collect()
        })
        .collect()
}

/// The action `(h . alpha)^{h^-1 g h} = T_h alpha^g`.
pub fn act_cochain(group: &Group, h: usize, c: &ConstantCochain, q: &QTuple) -> ConstantCochain {
    let n = q.dim();
    let pairs = pair_list(n);
    let t = invariance_matrix(group.element(h), q);
    let hinv = group.inverse(h);
    let mut out = ConstantCochain::new();
    for (g, k, l, a) in c.iter() {
        let col = pair_index(n, k, l);
        let target = group.mul(group.mul(hinv, g), h);
        for (row, &(i, j)) in pairs.iter().enumerate() {
            let f = &t[row][col];
            if !f.is_zero() {
                out.add(target, i, j, f * a);
            }
        }
    }
    out
}

/// Group average `|G|^-1 sum_h h . alpha`.
pub fn reynolds(group: &Group, c: &ConstantCochain, q: &QTuple) -> ConstantCochain {
    let mut acc = ConstantCochain::new();
    for h in 0..group.order() {
        acc = acc.plus(&act_cochain(group, h, c, q));
    }
    let inv = CycScalar::from_int(q.conductor(), group.order() as i64)
        .inv()
        .expect("nonzero order");
    acc.scale(&inv)
}

/// Whether `h . alpha = alpha` for every element `h` of the group.
pub fn is_fully_invariant(group: &Group, c: &ConstantCochain, q: &QTuple) -> bool {
    (0..group.order()).all(|h| act_cochain(group, h, c, q) == *c)
}

/// Constant 2-cocycles: echelon basis and dimension.
#[derive(Clone, Debug)]
pub struct CocycleBasis {
    pub basis: Vec<ConstantCochain>,
    pub dimension: usize,
}

fn mat_mul(a: &[Vec<CycScalar>], b: &[Vec<CycScalar>], conductor: u32) -> Vec<Vec<CycScalar>> {
    let p = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            let mut out = vec![CycScalar::zero(conductor); cols];
            for k in 0..p {
                if row[k].is_zero() {
                    continue;
                }
                for (o, x) in out.iter_mut().zip(&b[k]) {
                    if !x.is_zero() {
                        *o += &(&row[k] * x);
                    }
                }
            }
            out
        })
        .collect()
}

fn identity(p: usize, conductor: u32) -> Vec<Vec<CycScalar>> {
    (0..p)
        .map(|i| {
            (0..p)
                .map(|j| {
                    if i == j {
                        CycScalar::one(conductor)
                    } else {
                        CycScalar::zero(conductor)
                    }
                })
                .collect()
        })
        .collect()
}

/// Inserts the rows of `rows` (expressed in the representative's unknowns);
/// returns true once the system has full rank.
fn insert_rows(e: &mut Echelon, rows: impl IntoIterator<Item = Vec<CycScalar>>, p: usize) -> bool {
    for r in rows {
        e.insert(dense_to_sparse(&r));
        if e.rank() == p {
            return true;
        }
    }
    false
}

/// The `d_3^*` equations at `g`, as rows over the pairs of `alpha^g`.
fn d3_rows(m: &Matrix, q: &QTuple) -> Vec<Vec<CycScalar>> {
    let n = q.dim();
    let p = n * (n - 1) / 2;
    let conductor = q.conductor();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let forms = d3_forms(m, q, [i, j, k]);
                for t in 0..n {
                    let mut row = vec![CycScalar::zero(conductor); p];
                    for ((r, s), f) in &forms {
                        row[pair_index(n, *r, *s)] = f[t].clone();
                    }
                    if row.iter().any(|x| !x.is_zero()) {
                        rows.push(row);
                    }
                }
            }
        }
    }
    rows
}

/// Solves one conjugacy class: returns cochains supported on the class.
fn solve_class(
    group: &Group,
    q: &QTuple,
    rep: usize,
    gen_t: &[Vec<Vec<CycScalar>>],
) -> Vec<ConstantCochain> {
    let n = q.dim();
    let p = n * (n - 1) / 2;
    let conductor = q.conductor();
    if p == 0 {
        return Vec::new();
    }
    let mut e = Echelon::new();
    // A_g expresses alpha^g through alpha^rep along a BFS tree
    let mut coords: HashMap<usize, Vec<Vec<CycScalar>>> = HashMap::new();
    let mut order = vec![rep];
    coords.insert(rep, identity(p, conductor));
    let mut full = insert_rows(&mut e, d3_rows(group.element(rep), q), p);
    let mut queue = VecDeque::from([rep]);
    while let Some(g) = queue.pop_front() {
        if full {
            break;
        }
        let ag = coords[&g].clone();
        for (k, &h) in group.generators().iter().enumerate() {
            let target = group.mul(group.mul(group.inverse(h), g), h);
            let moved = mat_mul(&gen_t[k], &ag, conductor);
            match coords.get(&target) {
                Some(existing) => {
                    let rows = moved
                        .iter()
                        .zip(existing)
                        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect());
                    if insert_rows(&mut e, rows, p) {
                        full = true;
                        break;
                    }
                }
                None => {
                    let d3 = d3_rows(group.element(target), q);
                    let rows = mat_mul(&d3, &moved, conductor);
                    coords.insert(target, moved);
                    order.push(target);
                    queue.push_back(target);
                    if insert_rows(&mut e, rows, p) {
                        full = true;
                        break;
                    }
                }
            }
        }
    }
    if full {
        return Vec::new();
    }
    let mut members = order;
    members.sort_unstable();
    e.nullspace(p, conductor)
        .into_iter()
        .map(|x| {
            let mut c = ConstantCochain::new();
            for &g in &members {
                let ag = &coords[&g];
                let pairs = pair_list(n);
                for (row, &(r, s)) in pairs.iter().enumerate() {
                    let mut v = CycScalar::zero(conductor);
                    for (a, b) in ag[row].iter().zip(&x) {
                        if !a.is_zero() && !b.is_zero() {
                            v += &(a * b);
                        }
                    }
                    c.add(g, r, s, v);
                }
            }
            c
        })
        .collect()
}

/// Basis of the `G`-invariant constant cochains killed by `d_3^*`.
///
/// Each conjugacy class is an independent block, solved in parallel. Within a
/// class the unknowns are reduced to those of the representative by walking
/// conjugation by generators; every extra edge of the walk contributes an
/// invariance constraint.
pub fn solve_constant_cocycles(group: &Group, q: &QTuple) -> Result<CocycleBasis, KoszulError> {
    let action = check_q_action(group, q);
    if !action.passed() {
        return Err(KoszulError::ActionFailed(action));
    }
    let ext = check_exterior_extension(group, q);
    if !ext.passed() {
        return Err(KoszulError::ExteriorFailed(ext));
    }
    let gen_t: Vec<Vec<Vec<CycScalar>>> = group
        .generators()
        .iter()
        .map(|&h| invariance_matrix(group.element(h), q))
        .collect();
    let cd = group.conjugacy_data();
    let blocks = par::map(&cd.representatives, |&rep| solve_class(group, q, rep, &gen_t));
    let basis: Vec<ConstantCochain> = blocks.into_iter().flatten().collect();
    Ok(CocycleBasis {
        dimension: basis.len(),
        basis,
    })
}

/// `alpha(Psi_2(v_i (x) v_j))`: `sum_g alpha^g_ij g` for `i < j`, else 0.
pub fn psi2_apply(c: &ConstantCochain, i: usize, j: usize) -> GroupAlgebraElement {
    let mut out = GroupAlgebraElement::new();
    if i < j {
        for (g, r, s, a) in c.iter() {
            if r == i && s == j {
                add_to(&mut out, g, a.clone());
            }
        }
    }
    out
}

/// `mu_1(v_i (x) v_j) = |G|^-1 sum_g g(alpha(Psi_2(g^-1 v_i (x) g^-1 v_j)))`.
pub fn mu1_on_generators(
    c: &ConstantCochain,
    group: &Group,
    q: &QTuple,
) -> Result<Vec<Vec<GroupAlgebraElement>>, KoszulError> {
    let action = check_q_action(group, q);
    if !action.passed() {
        return Err(KoszulError::ActionFailed(action));
    }
    let ext = check_exterior_extension(group, q);
    if !ext.passed() {
        return Err(KoszulError::ExteriorFailed(ext));
    }
    let n = q.dim();
    let conductor = q.conductor();
    let inv_order = CycScalar::from_int(conductor, group.order() as i64)
        .inv()
        .expect("nonzero order");
    // values of alpha on wedges, grouped by pair
    let mut by_pair: BTreeMap<(usize, usize), Vec<(usize, CycScalar)>> = BTreeMap::new();
    for (g, r, s, a) in c.iter() {
        by_pair.entry((r, s)).or_default().push((g, a.clone()));
    }
    let mut table = vec![vec![GroupAlgebraElement::new(); n]; n];
    for g in 0..group.order() {
        let ginv = group.inverse(g);
        for i in 0..n {
            for j in 0..n {
                for (k, a) in group.image(ginv, i) {
                    for (l, b) in group.image(ginv, j) {
                        if k >= l {
                            continue;
                        }
                        let Some(vals) = by_pair.get(&(*k, *l)) else {
                            continue;
                        };
                        let ab = a * b;
                        for (h, v) in vals {
                            add_to(&mut table[i][j], group.conjugate(g, *h), &ab * v);
                        }
                    }
                }
            }
        }
    }
    for row in table.iter_mut() {
        for cell in row.iter_mut() {
            for v in cell.values_mut() {
                *v = &*v * &inv_order;
            }
        }
    }
    Ok(table)
}
