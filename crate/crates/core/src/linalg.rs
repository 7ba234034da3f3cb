//! Exact linear algebra over `Q(zeta_N)`: sparse rows and an incremental
//! reduced row-echelon form.

use std::collections::BTreeMap;

use crate::cyclotomic::CycScalar;

/// A sparse vector indexed by column.
pub type SparseRow = BTreeMap<usize, CycScalar>;

pub fn dense_to_sparse(row: &[CycScalar]) -> SparseRow {
    row.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

pub fn sparse_to_dense(row: &SparseRow, len: usize, conductor: u32) -> Vec<CycScalar> {
    let mut out = vec![CycScalar::zero(conductor); len];
    for (&i, c) in row {
        out[i] = c.clone();
    }
    out
}

/// `target += factor * source`, dropping cancelled entries.
pub fn axpy(target: &mut SparseRow, factor: &CycScalar, source: &SparseRow) {
    for (&col, value) in source {
        let add = factor * value;
        match target.entry(col) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &add;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                if !add.is_zero() {
                    e.insert(add);
                }
            }
        }
    }
}

/// Incremental reduced row-echelon basis of a row space.
///
/// Every stored row has leading coefficient 1 at its pivot, and no other
/// stored row has an entry in that pivot column.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    pub fn new() -> Echelon {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = (&usize, &SparseRow)> {
        self.rows.iter()
    }

    /// Reduces `row` against the stored basis.
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        let cols: Vec<usize> = row.keys().copied().collect();
        for col in cols {
            if let Some(basis) = self.rows.get(&col) {
                if let Some(c) = row.get(&col) {
                    let f = -c;
                    axpy(&mut row, &f, basis);
                }
            }
        }
        row
    }

    pub fn contains(&self, row: SparseRow) -> bool {
        self.reduce(row).is_empty()
    }

    /// Adds a row; returns `true` when it enlarged the span.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let mut row = self.reduce(row);
        let Some((&pivot, lead)) = row.iter().next() else {
            return false;
        };
        let inv = lead.inv().expect("nonzero pivot");
        for v in row.values_mut() {
            *v = &*v * &inv;
        }
        for other in self.rows.values_mut() {
            if let Some(c) = other.get(&pivot) {
                let f = -c;
                axpy(other, &f, &row);
            }
        }
        row.retain(|_, v| !v.is_zero());
        self.rows.insert(pivot, row);
        true
    }

    /// Basis of `{x : r . x = 0 for every stored row r}` in `ncols` unknowns,
    /// one vector per free column in increasing order.
    pub fn nullspace(&self, ncols: usize, conductor: u32) -> Vec<Vec<CycScalar>> {
        let mut out = Vec::new();
        for free in 0..ncols {
            if self.rows.contains_key(&free) {
                continue;
            }
            let mut v = vec![CycScalar::zero(conductor); ncols];
            v[free] = CycScalar::one(conductor);
            for (&p, row) in &self.rows {
                if let Some(c) = row.get(&free) {
                    v[p] = -c;
                }
            }
            out.push(v);
        }
        out
    }
}

/// Rank of a list of sparse rows.
pub fn rank(rows: impl IntoIterator<Item = SparseRow>) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Nullspace of a dense matrix given by rows.
pub fn nullspace(rows: &[Vec<CycScalar>], ncols: usize, conductor: u32) -> Vec<Vec<CycScalar>> {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(dense_to_sparse(r));
    }
    e.nullspace(ncols, conductor)
}

/// Dense matrix-vector product.
pub fn mat_vec(rows: &[Vec<CycScalar>], v: &[CycScalar], conductor: u32) -> Vec<CycScalar> {
    rows.iter()
        .map(|r| {
            let mut acc = CycScalar::zero(conductor);
            for (a, b) in r.iter().zip(v) {
                if !a.is_zero() && !b.is_zero() {
                    acc += &(a * b);
                }
            }
            acc
        })
        .collect()
}

/// Whether two lists of vectors span the same subspace.
pub fn same_span(a: &[Vec<CycScalar>], b: &[Vec<CycScalar>]) -> bool {
    let mut ea = Echelon::new();
    for v in a {
        ea.insert(dense_to_sparse(v));
    }
    let mut eb = Echelon::new();
    for v in b {
        eb.insert(dense_to_sparse(v));
    }
    ea.rank() == eb.rank() && b.iter().all(|v| ea.contains(dense_to_sparse(v)))
}
