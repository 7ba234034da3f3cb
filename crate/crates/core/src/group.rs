//! Finite matrix groups over `Q(zeta_N)`.
//!
//! A matrix `M` acts on the basis `v_0, ..., v_{n-1}` by columns: the image
//! of `v_j` is `sum_i M[i][j] v_i`, so `M[i][j]` is the coefficient written
//! `g^j_i` elsewhere in the crate.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::cyclotomic::CycScalar;
use crate::qalgebra::QTuple;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("group closure exceeded the cap of {cap} elements")]
    ClosureCapExceeded { cap: usize },
    #[error("generator {name} is not invertible")]
    NonInvertibleGenerator { name: String },
    #[error("generator {name} has the wrong shape or field")]
    ShapeMismatch { name: String },
    #[error("matrix is not square: {rows} rows, {len} entries")]
    NotSquare { rows: usize, len: usize },
}

/// A square matrix over a single cyclotomic field, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    entries: Vec<CycScalar>,
}

impl Matrix {
    pub fn new(n: usize, entries: Vec<CycScalar>) -> Result<Matrix, GroupError> {
        if entries.len() != n * n {
            return Err(GroupError::NotSquare {
                rows: n,
                len: entries.len(),
            });
        }
        Ok(Matrix { n, entries })
    }

    pub fn from_rows(rows: Vec<Vec<CycScalar>>) -> Result<Matrix, GroupError> {
        let n = rows.len();
        let entries: Vec<CycScalar> = rows.into_iter().flatten().collect();
        Matrix::new(n, entries)
    }

    pub fn identity(n: usize, conductor: u32) -> Matrix {
        let mut entries = vec![CycScalar::zero(conductor); n * n];
        for i in 0..n {
            entries[i * n + i] = CycScalar::one(conductor);
        }
        Matrix { n, entries }
    }

    /// Diagonal matrix `diag(zeta^e_0, ..., zeta^e_{n-1})`.
    pub fn diagonal_roots(conductor: u32, exps: &[i64]) -> Matrix {
        let n = exps.len();
        let mut m = Matrix::identity(n, conductor);
        for (i, &e) in exps.iter().enumerate() {
            m.entries[i * n + i] = CycScalar::root_of_unity(conductor, e);
        }
        m
    }

    /// Monomial matrix sending `v_j` to `zeta^{exps[j]} v_{perm[j]}`.
    pub fn monomial(conductor: u32, perm: &[usize], exps: &[i64]) -> Matrix {
        let n = perm.len();
        let mut entries = vec![CycScalar::zero(conductor); n * n];
        for j in 0..n {
            entries[perm[j] * n + j] = CycScalar::root_of_unity(conductor, exps[j]);
        }
        Matrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn conductor(&self) -> u32 {
        self.entries[0].conductor()
    }

    pub fn get(&self, i: usize, j: usize) -> &CycScalar {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: CycScalar) {
        self.entries[i * self.n + j] = value;
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        let conductor = self.conductor();
        let mut entries = vec![CycScalar::zero(conductor); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.entries[k * n + j];
                    if !b.is_zero() {
                        entries[i * n + j] += &(a * b);
                    }
                }
            }
        }
        Matrix { n, entries }
    }

    pub fn determinant(&self) -> CycScalar {
        let n = self.n;
        let conductor = self.conductor();
        let mut a: Vec<Vec<CycScalar>> = (0..n)
            .map(|i| self.entries[i * n..(i + 1) * n].to_vec())
            .collect();
        let mut det = CycScalar::one(conductor);
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return CycScalar::zero(conductor);
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            det = &det * &a[col][col];
            let inv = a[col][col].inv().expect("nonzero pivot");
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] * &inv;
                for j in col..n {
                    let t = &f * &a[col][j];
                    a[r][j] -= &t;
                }
            }
        }
        det
    }

    /// Sparse image of `v_j`: pairs `(i, M[i][j])` with nonzero entry.
    pub fn column(&self, j: usize) -> Vec<(usize, CycScalar)> {
        (0..self.n)
            .filter(|&i| !self.get(i, j).is_zero())
            .map(|i| (i, self.get(i, j).clone()))
            .collect()
    }

    /// Whether every column has exactly one nonzero entry.
    pub fn is_monomial(&self) -> bool {
        (0..self.n).all(|j| self.column(j).len() == 1)
    }

    /// Whether the matrix is diagonal.
    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).is_zero()))
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.n {
            if i > 0 {
                f.write_str("; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        f.write_str("]")
    }
}

/// Conjugacy classes with representatives, centralizers and transversals.
///
/// For class `c` with representative `a`, `transversals[c][k]` conjugates `a`
/// to `classes[c][k]`: `t a t^-1 = classes[c][k]`.
#[derive(Clone, Debug)]
pub struct ConjugacyData {
    pub classes: Vec<Vec<usize>>,
    pub representatives: Vec<usize>,
    pub centralizers: Vec<Vec<usize>>,
    pub transversals: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
}

const TABLE_LIMIT: usize = 4096;

/// A finite group of invertible matrices, with index-based element access.
///
/// Index 0 is always the identity. Products use a full table for groups of at
/// most 4096 elements and otherwise walk the shortest generator word.
#[derive(Clone)]
pub struct Group {
    dim: usize,
    conductor: u32,
    elements: Vec<Matrix>,
    lookup: HashMap<Matrix, usize>,
    generator_names: Vec<String>,
    generators: Vec<usize>,
    /// `left_gen[k][x]` is the index of `gen_k * x`.
    left_gen: Vec<Vec<u32>>,
    /// BFS parent: element `x != e` equals `gen_{parent[x].0} * parent[x].1`.
    parent: Vec<(u32, u32)>,
    inverses: Vec<usize>,
    table: Option<Vec<u32>>,
    images: Vec<Vec<Vec<(usize, CycScalar)>>>,
}

impl Group {
    /// Closes the named generators under multiplication.
    pub fn generate(
        dim: usize,
        conductor: u32,
        generators: Vec<(String, Matrix)>,
        cap: usize,
    ) -> Result<Group, GroupError> {
        for (name, m) in &generators {
            if m.dim() != dim || m.conductor() != conductor {
                return Err(GroupError::ShapeMismatch { name: name.clone() });
            }
            if m.determinant().is_zero() {
                return Err(GroupError::NonInvertibleGenerator { name: name.clone() });
            }
        }
        let identity = Matrix::identity(dim, conductor);
        let mut elements = vec![identity.clone()];
        let mut lookup = HashMap::new();
        lookup.insert(identity, 0usize);
        let mut parent = vec![(u32::MAX, u32::MAX)];
        let ngen = generators.len();
        let mut left_gen: Vec<Vec<u32>> = vec![Vec::new(); ngen];
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (k, (_, gm)) in generators.iter().enumerate() {
                let prod = gm.mul(&elements[x]);
                let idx = match lookup.get(&prod) {
                    Some(&i) => i,
                    None => {
                        let i = elements.len();
                        if i >= cap {
                            return Err(GroupError::ClosureCapExceeded { cap });
                        }
                        lookup.insert(prod.clone(), i);
                        elements.push(prod);
                        parent.push((k as u32, x as u32));
                        queue.push_back(i);
                        i
                    }
                };
                let row = &mut left_gen[k];
                if row.len() <= x {
                    row.resize(x + 1, u32::MAX);
                }
                row[x] = idx as u32;
            }
        }
        let order = elements.len();
        for row in left_gen.iter_mut() {
            row.resize(order, u32::MAX);
        }
        let gen_indices: Vec<usize> = generators
            .iter()
            .map(|(_, m)| lookup[m])
            .collect();
        let images = elements
            .iter()
            .map(|m| (0..dim).map(|j| m.column(j)).collect())
            .collect();
        let mut group = Group {
            dim,
            conductor,
            elements,
            lookup,
            generator_names: generators.into_iter().map(|(n, _)| n).collect(),
            generators: gen_indices,
            left_gen,
            parent,
            inverses: Vec::new(),
            table: None,
            images,
        };
        if order <= TABLE_LIMIT {
            let mut table = vec![0u32; order * order];
            for y in 0..order {
                table[y] = y as u32;
            }
            for x in 1..order {
                let (k, p) = group.parent[x];
                let p = p as usize;
                for y in 0..order {
                    let py = table[p * order + y] as usize;
                    table[x * order + y] = group.left_gen[k as usize][py];
                }
            }
            group.table = Some(table);
        }
        // gen_k^-1 is the element sent to the identity by left multiplication
        let inv_gen: Vec<usize> = (0..ngen)
            .map(|k| {
                group.left_gen[k]
                    .iter()
                    .position(|&v| v == 0)
                    .expect("finite group generator has an inverse")
            })
            .collect();
        let mut inverses = vec![0usize; order];
        // BFS order guarantees parents precede children
        for x in 1..order {
            let (k, p) = group.parent[x];
            inverses[x] = group.mul(inverses[p as usize], inv_gen[k as usize]);
        }
        group.inverses = inverses;
        Ok(group)
    }

    /// The trivial group on an `dim`-dimensional space.
    pub fn trivial(dim: usize, conductor: u32) -> Group {
        Group::generate(dim, conductor, Vec::new(), 1).expect("trivial group")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn element(&self, g: usize) -> &Matrix {
        &self.elements[g]
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn index_of(&self, m: &Matrix) -> Option<usize> {
        self.lookup.get(m).copied()
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    /// Element indices of the generators, in input order.
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn generator_by_name(&self, name: &str) -> Option<usize> {
        self.generator_names
            .iter()
            .position(|n| n == name)
            .map(|k| self.generators[k])
    }

    pub fn has_product_table(&self) -> bool {
        self.table.is_some()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        if let Some(t) = &self.table {
            return t[a * self.order() + b] as usize;
        }
        // a = gen_{k1} gen_{k2} ... gen_{kr}; apply from the right end
        let mut ks = Vec::new();
        let mut x = a;
        while x != 0 {
            let (k, p) = self.parent[x];
            ks.push(k);
            x = p as usize;
        }
        let mut y = b;
        for &k in ks.iter().rev() {
            y = self.left_gen[k as usize][y] as usize;
        }
        y
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverses[g]
    }

    /// `g a g^-1`.
    pub fn conjugate(&self, g: usize, a: usize) -> usize {
        self.mul(self.mul(g, a), self.inverse(g))
    }

    /// A shortest word for `g` as generator positions, leftmost first.
    pub fn word(&self, g: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut x = g;
        while x != 0 {
            let (k, p) = self.parent[x];
            out.push(k as usize);
            x = p as usize;
        }
        out
    }

    /// The word for `g` rendered with generator names, `e` for the identity.
    pub fn word_string(&self, g: usize) -> String {
        let w = self.word(g);
        if w.is_empty() {
            return "e".to_string();
        }
        w.iter()
            .map(|&k| self.generator_names[k].as_str())
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Sparse image of `v_j` under `g`.
    pub fn image(&self, g: usize, j: usize) -> &[(usize, CycScalar)] {
        &self.images[g][j]
    }

    pub fn conjugacy_data(&self) -> ConjugacyData {
        let order = self.order();
        let mut class_of = vec![usize::MAX; order];
        let mut classes = Vec::new();
        let mut representatives = Vec::new();
        let mut centralizers = Vec::new();
        let mut transversals = Vec::new();
        for a in 0..order {
            if class_of[a] != usize::MAX {
                continue;
            }
            let c = classes.len();
            let mut members = Vec::new();
            let mut trans = Vec::new();
            let mut cent = Vec::new();
            for g in 0..order {
                let y = self.conjugate(g, a);
                if y == a {
                    cent.push(g);
                }
                if class_of[y] == usize::MAX {
                    class_of[y] = c;
                    members.push(y);
                    trans.push(g);
                }
            }
            classes.push(members);
            representatives.push(a);
            centralizers.push(cent);
            transversals.push(trans);
        }
        ConjugacyData {
            classes,
            representatives,
            centralizers,
            transversals,
            class_of,
        }
    }
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group")
            .field("dim", &self.dim)
            .field("conductor", &self.conductor)
            .field("order", &self.order())
            .field("generators", &self.generator_names)
            .finish()
    }
}

/// One failed instance of an action condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionViolation {
    pub element: usize,
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
    pub residual: CycScalar,
}

/// Result of an action check. Only the first few violations are kept.
#[derive(Clone, Debug, Default)]
pub struct ActionReport {
    pub violations: Vec<ActionViolation>,
    pub total_violations: usize,
}

impl ActionReport {
    pub fn passed(&self) -> bool {
        self.total_violations == 0
    }

    fn record(&mut self, v: ActionViolation) {
        self.total_violations += 1;
        if self.violations.len() < 16 {
            self.violations.push(v);
        }
    }
}

/// `g^i_k g^j_l (1 - q_ij q_lk) + g^i_l g^j_k (q_lk - q_ij)` for `k < l`,
/// and `g^i_k g^j_k (1 - q_ij)` for `k = l`.
pub fn q_action_residual(
    m: &Matrix,
    q: &QTuple,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> CycScalar {
    let conductor = m.conductor();
    let one = CycScalar::one(conductor);
    let gik = m.get(k, i);
    let gjl = m.get(l, j);
    if k == l {
        return gik * m.get(k, j) * (&one - q.get(i, j));
    }
    let gil = m.get(l, i);
    let gjk = m.get(k, j);
    let mut r = CycScalar::zero(conductor);
    if !gik.is_zero() && !gjl.is_zero() {
        r += &(gik * gjl * (&one - &(q.get(i, j) * q.get(l, k))));
    }
    if !gil.is_zero() && !gjk.is_zero() {
        r += &(gil * gjk * (q.get(l, k) - q.get(i, j)));
    }
    r
}

/// `(1 - q_ij q_lk) g^i_k g^j_l + (q_ij - q_lk) g^i_l g^j_k`.
pub fn exterior_residual(
    m: &Matrix,
    q: &QTuple,
    i: usize,
    j: usize,
    k: usize,
    l: usize,
) -> CycScalar {
    let conductor = m.conductor();
    let one = CycScalar::one(conductor);
    let gik = m.get(k, i);
    let gjl = m.get(l, j);
    let gil = m.get(l, i);
    let gjk = m.get(k, j);
    let mut r = CycScalar::zero(conductor);
    if !gik.is_zero() && !gjl.is_zero() {
        r += &(gik * gjl * (&one - &(q.get(i, j) * q.get(l, k))));
    }
    if !gil.is_zero() && !gjk.is_zero() {
        r += &(gil * gjk * (q.get(i, j) - q.get(l, k)));
    }
    r
}

/// Checks that every element preserves the quantum symmetric relations
/// `v_j v_i = q_ji v_i v_j`.
pub fn check_q_action(group: &Group, q: &QTuple) -> ActionReport {
    let n = group.dim();
    let mut report = ActionReport::default();
    for (g, m) in group.elements().iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for k in 0..n {
                    for l in k..n {
                        let r = q_action_residual(m, q, i, j, k, l);
                        if !r.is_zero() {
                            report.record(ActionViolation {
                                element: g,
                                i,
                                j,
                                k,
                                l,
                                residual: r,
                            });
                        }
                    }
                }
            }
        }
    }
    report
}

/// Checks that the action extends to the quantum exterior algebra.
pub fn check_exterior_extension(group: &Group, q: &QTuple) -> ActionReport {
    let n = group.dim();
    let mut report = ActionReport::default();
    for (g, m) in group.elements().iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for k in 0..n {
                    for l in k + 1..n {
                        let r = exterior_residual(m, q, i, j, k, l);
                        if !r.is_zero() {
                            report.record(ActionViolation {
                                element: g,
                                i,
                                j,
                                k,
                                l,
                                residual: r,
                            });
                        }
                    }
                }
            }
        }
    }
    report
}
