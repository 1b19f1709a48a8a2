//! Exact linear algebra over the Gaussian rationals.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// Sparse matrix with no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Scalar>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, row: usize, col: usize, value: Scalar) {
        assert!(row < self.rows && col < self.cols, "index out of range");
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Scalar {
        self.entries
            .get(&(row, col))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|(&(i, j), x)| (i, j, x))
    }

    pub fn transpose(&self) -> Self {
        Matrix {
            rows: self.cols,
            cols: self.rows,
            entries: self
                .entries
                .iter()
                .map(|(&(i, j), x)| ((j, i), x.clone()))
                .collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![Scalar::zero(); self.rows];
        for (&(i, j), x) in &self.entries {
            if !v[j].is_zero() {
                out[i] += &(x * &v[j]);
            }
        }
        out
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut m = self.clone();
        m.rows += other.rows;
        for (&(i, j), x) in &other.entries {
            m.entries.insert((i + self.rows, j), x.clone());
        }
        m
    }

    fn sparse_rows(&self) -> Vec<BTreeMap<usize, Scalar>> {
        let mut rows = vec![BTreeMap::new(); self.rows];
        for (&(i, j), x) in &self.entries {
            rows[i].insert(j, x.clone());
        }
        rows
    }
}

/// Reduced row echelon form as sparse rows, together with the pivot columns.
fn rref(m: &Matrix) -> (Vec<BTreeMap<usize, Scalar>>, Vec<usize>) {
    let mut pending = m.sparse_rows();
    pending.retain(|r| !r.is_empty());
    let mut reduced: Vec<BTreeMap<usize, Scalar>> = Vec::new();
    let mut pivots = Vec::new();

    for col in 0..m.cols() {
        let Some(pos) = pending.iter().position(|r| r.contains_key(&col)) else {
            continue;
        };
        let mut pivot_row = pending.swap_remove(pos);
        let inv = pivot_row[&col].inv();
        for x in pivot_row.values_mut() {
            *x = &*x * &inv;
        }
        for row in pending.iter_mut().chain(reduced.iter_mut()) {
            if let Some(factor) = row.get(&col).cloned() {
                eliminate(row, &pivot_row, &factor);
            }
        }
        pending.retain(|r| !r.is_empty());
        reduced.push(pivot_row);
        pivots.push(col);
    }
    (reduced, pivots)
}

/// `row -= factor * pivot`, dropping cancelled entries.
fn eliminate(row: &mut BTreeMap<usize, Scalar>, pivot: &BTreeMap<usize, Scalar>, factor: &Scalar) {
    for (&j, p) in pivot {
        let delta = factor * p;
        let entry = row.entry(j).or_insert_with(Scalar::zero);
        *entry -= &delta;
        if entry.is_zero() {
            row.remove(&j);
        }
    }
}

pub fn rank(m: &Matrix) -> usize {
    rref(m).1.len()
}

/// Basis of the right null space, one vector per free column.
///
/// Each vector has a 1 in its free column and zeros in every other free
/// column, so the basis is in reduced echelon form and its order follows
/// the column order.
pub fn kernel_basis(m: &Matrix) -> Vec<Vec<Scalar>> {
    let (rows, pivots) = rref(m);
    let mut is_pivot = vec![None; m.cols()];
    for (r, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(r);
    }
    let mut basis = Vec::new();
    for free in 0..m.cols() {
        if is_pivot[free].is_some() {
            continue;
        }
        let mut v = vec![Scalar::zero(); m.cols()];
        v[free] = Scalar::one();
        for (r, &c) in pivots.iter().enumerate() {
            if let Some(x) = rows[r].get(&free) {
                v[c] = -x;
            }
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let m = Matrix::identity(2);
        assert!(kernel_basis(&m).is_empty());
        assert_eq!(rank(&Matrix::identity(5)), 5);
    }

    #[test]
    fn zero_map() {
        let m = Matrix::zeros(2, 3);
        assert_eq!(kernel_basis(&m).len(), 3);
        assert_eq!(rank(&m), 0);
        assert_eq!(kernel_basis(&Matrix::zeros(0, 4)).len(), 4);
    }

    #[test]
    fn gaussian_rank_one() {
        // row 2 = -i * row 1
        let i = Scalar::i();
        let m = Matrix::from_dense(&[vec![s(1), i.clone()], vec![-&i, s(1)]]);
        assert_eq!(rank(&m), 1);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        // x + i y = 0 with y = 1
        assert_eq!(k[0], vec![-&i, s(1)]);
        assert!(m.mul_vec(&k[0]).iter().all(Zero::is_zero));
    }

    fn unit_entry() -> impl Strategy<Value = Scalar> {
        prop_oneof![
            Just(Scalar::zero()),
            Just(s(1)),
            Just(s(-1)),
            Just(Scalar::i()),
            Just(-Scalar::i()),
        ]
    }

    fn small_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(unit_entry(), c), r)
                .prop_map(|rows| Matrix::from_dense(&rows))
        })
    }

    proptest! {
        #[test]
        fn kernel_is_annihilated(m in small_matrix()) {
            let k = kernel_basis(&m);
            prop_assert_eq!(k.len() + rank(&m), m.cols());
            let mut free_cols = Vec::new();
            for v in &k {
                prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
                // leading free column carries a 1 and is distinct per vector
                let lead = v.iter().rposition(|x| !x.is_zero()).unwrap();
                prop_assert!(v[lead].is_one());
                free_cols.push(lead);
            }
            let mut dedup = free_cols.clone();
            dedup.dedup();
            prop_assert_eq!(dedup.len(), free_cols.len());
        }

        #[test]
        fn rank_of_transpose(m in small_matrix()) {
            prop_assert_eq!(rank(&m), rank(&m.transpose()));
        }
    }
}
