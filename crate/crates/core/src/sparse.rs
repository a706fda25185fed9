//! Sparse integer vectors and column-major matrices.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Sorted `(index, coefficient)` pairs with no zero coefficients.
pub type SparseVec = Vec<(u32, i64)>;

/// Builds a sparse vector from unsorted terms, merging duplicates.
pub fn collect_terms<I: IntoIterator<Item = (u32, i64)>>(terms: I) -> SparseVec {
    let mut m: BTreeMap<u32, i64> = BTreeMap::new();
    for (i, c) in terms {
        let e = m.entry(i).or_insert(0);
        *e = e.checked_add(c).expect("coefficient overflow");
    }
    m.into_iter().filter(|&(_, c)| c != 0).collect()
}

/// Sorts and merges in place.
pub fn canonicalize(v: &mut SparseVec) {
    v.sort_unstable_by_key(|&(i, _)| i);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for &(i, c) in v.iter() {
        match out.last_mut() {
            Some((j, d)) if *j == i => *d = d.checked_add(c).expect("coefficient overflow"),
            _ => out.push((i, c)),
        }
    }
    out.retain(|&(_, c)| c != 0);
    *v = out;
}

pub fn add_scaled(a: &SparseVec, b: &SparseVec, s: i64) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, b[j].1.checked_mul(s).expect("coefficient overflow")));
            j += 1;
        } else {
            let c = a[i].1 + b[j].1.checked_mul(s).expect("coefficient overflow");
            if c != 0 {
                out.push((a[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn dense_to_sparse(v: &[i64]) -> SparseVec {
    v.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i as u32, c)).collect()
}

pub fn sparse_to_dense(v: &SparseVec, n: usize) -> Vec<i64> {
    let mut d = vec![0; n];
    for &(i, c) in v {
        d[i as usize] = c;
    }
    d
}

/// Column-major sparse integer matrix: `cols[j]` is the image of basis vector `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub cols: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, cols: vec![Vec::new(); ncols] }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut terms = Vec::new();
        for &(j, c) in v {
            for &(i, d) in &self.cols[j as usize] {
                terms.push((i, c.checked_mul(d).expect("coefficient overflow")));
            }
        }
        canonicalize(&mut terms);
        terms
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols(), other.nrows, "shape mismatch in composition");
        SparseMatrix { nrows: self.nrows, cols: other.cols.iter().map(|c| self.apply(c)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows: Vec<SparseVec> = vec![Vec::new(); self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            for &(i, v) in c {
                rows[i as usize].push((j as u32, v));
            }
        }
        SparseMatrix { nrows: self.ncols(), cols: rows }
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0; self.ncols()]; self.nrows];
        for (j, c) in self.cols.iter().enumerate() {
            for &(i, v) in c {
                m[i as usize][j] = v;
            }
        }
        m
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let cols = (0..ncols)
            .map(|j| {
                (0..nrows)
                    .filter(|&i| rows[i][j] != 0)
                    .map(|i| (i as u32, rows[i][j]))
                    .collect()
            })
            .collect();
        SparseMatrix { nrows, cols }
    }

    /// Triplets `(row, col, value)` in column order.
    pub fn triplets(&self) -> Vec<(u32, u32, i64)> {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |&(i, v)| (i, j as u32, v)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let a = vec![(0, 1), (3, 2)];
        let b = vec![(3, 1), (5, 1)];
        assert_eq!(add_scaled(&a, &b, -2), vec![(0, 1), (5, -2)]);
        assert_eq!(collect_terms([(2, 1), (1, 1), (2, -1)]), vec![(1, 1)]);
        let m = SparseMatrix::from_dense(&[vec![1, 2], vec![0, 3]]);
        assert_eq!(m.to_dense(), vec![vec![1, 2], vec![0, 3]]);
        assert_eq!(m.transpose().to_dense(), vec![vec![1, 0], vec![2, 3]]);
        let sq = m.compose(&m);
        assert_eq!(sq.to_dense(), vec![vec![1, 8], vec![0, 9]]);
    }
}
