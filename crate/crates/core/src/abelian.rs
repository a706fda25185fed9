//! Finitely generated abelian groups and finite subgroup arithmetic.

use crate::intmatrix::{smith_normal_form, smith_normal_form_partial, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// `Z^free_rank ⊕ Z/d₁ ⊕ … ⊕ Z/d_m` with `d₁ | d₂ | …`, all `d_i > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FGAbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<u64>,
}

impl FGAbelianGroup {
    pub fn zero() -> Self {
        FGAbelianGroup { free_rank: 0, torsion: vec![] }
    }

    pub fn free(rank: usize) -> Self {
        FGAbelianGroup { free_rank: rank, torsion: vec![] }
    }

    /// Normalizes any list of cyclic orders (0 meaning `Z`) into invariant factors.
    pub fn from_cyclic_orders(orders: &[u64]) -> Self {
        let free_rank = orders.iter().filter(|&&d| d == 0).count();
        let n = orders.len();
        let mut m = IntMatrix::zeros(n, n);
        for (i, &d) in orders.iter().enumerate() {
            m.set(i, i, BigInt::from(d));
        }
        let diag = smith_normal_form_partial(&m, false, false).diagonal();
        let torsion = diag
            .iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .map(|d| d.to_u64().expect("torsion exceeds u64"))
            .collect();
        FGAbelianGroup { free_rank, torsion }
    }

    /// Cokernel `Z^rows / im(m)`.
    pub fn cokernel(m: &IntMatrix) -> Self {
        let diag = smith_normal_form_partial(m, false, false).diagonal();
        let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
        let torsion = diag
            .iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .map(|d| d.to_u64().expect("torsion exceeds u64"))
            .collect();
        FGAbelianGroup { free_rank: m.rows - nonzero, torsion }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn order(&self) -> Option<u128> {
        self.is_finite().then(|| self.torsion.iter().map(|&d| d as u128).product())
    }

    /// Orders of the cyclic factors in the order used for coordinates:
    /// torsion first, then `0` for each free factor.
    pub fn coordinate_orders(&self) -> Vec<u64> {
        let mut v = self.torsion.clone();
        v.extend(std::iter::repeat(0).take(self.free_rank));
        v
    }

    pub fn ngens(&self) -> usize {
        self.torsion.len() + self.free_rank
    }
}

impl fmt::Display for FGAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = vec![];
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" + "))
    }
}

/// Reduces coordinates modulo the cyclic orders (`0` = free).
pub fn normalize(orders: &[u64], v: &mut [i64]) {
    for (x, &o) in v.iter_mut().zip(orders) {
        if o > 0 {
            *x = x.rem_euclid(o as i64);
        }
    }
}

/// A lattice in `Z^n` kept in Hermite normal form, for membership tests.
#[derive(Debug, Clone)]
pub struct Lattice {
    pub dim: usize,
    rows: Vec<Vec<BigInt>>,
}

impl Lattice {
    pub fn new(dim: usize) -> Self {
        Lattice { dim, rows: Vec::new() }
    }

    /// Lattice spanned by `gens` together with `o_i e_i` for finite orders.
    pub fn with_relations(orders: &[u64], gens: &[Vec<i64>]) -> Self {
        let mut l = Lattice::new(orders.len());
        for (i, &o) in orders.iter().enumerate() {
            if o > 0 {
                let mut e = vec![0i64; orders.len()];
                e[i] = o as i64;
                l.insert(&e);
            }
        }
        for g in gens {
            l.insert(g);
        }
        l
    }

    fn lead(row: &[BigInt]) -> Option<usize> {
        row.iter().position(|x| !x.is_zero())
    }

    pub fn insert(&mut self, v: &[i64]) {
        let v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        self.insert_big(v);
    }

    pub fn insert_big(&mut self, mut v: Vec<BigInt>) {
        assert_eq!(v.len(), self.dim);
        let mut idx = 0;
        loop {
            let Some(c) = Self::lead(&v) else { return };
            while idx < self.rows.len() && Self::lead(&self.rows[idx]).unwrap() < c {
                idx += 1;
            }
            if idx == self.rows.len() || Self::lead(&self.rows[idx]).unwrap() > c {
                if v[c].is_negative() {
                    v.iter_mut().for_each(|x| *x = -std::mem::take(x));
                }
                self.rows.insert(idx, v);
                self.reduce_above(idx);
                return;
            }
            // same leading column: extended gcd combination
            let a = self.rows[idx][c].clone();
            let b = v[c].clone();
            let e = a.extended_gcd(&b);
            let (g, x, y) = (e.gcd, e.x, e.y);
            let (ag, bg) = (&a / &g, &b / &g);
            let row = &self.rows[idx];
            let new_row: Vec<BigInt> =
                row.iter().zip(&v).map(|(r, w)| &x * r + &y * w).collect();
            let rest: Vec<BigInt> =
                row.iter().zip(&v).map(|(r, w)| &bg * r - &ag * w).collect();
            self.rows[idx] = new_row;
            self.reduce_above(idx);
            v = rest;
            debug_assert!(v[c].is_zero());
        }
    }

    fn reduce_above(&mut self, idx: usize) {
        let c = Self::lead(&self.rows[idx]).unwrap();
        if self.rows[idx][c].is_negative() {
            self.rows[idx].iter_mut().for_each(|x| *x = -std::mem::take(x));
        }
        let piv = self.rows[idx][c].clone();
        let pivot_row = self.rows[idx].clone();
        for k in 0..idx {
            let q = self.rows[k][c].div_floor(&piv);
            if !q.is_zero() {
                for (x, p) in self.rows[k].iter_mut().zip(&pivot_row) {
                    *x -= &q * p;
                }
            }
        }
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        let mut v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        for row in &self.rows {
            let c = Self::lead(row).unwrap();
            if let Some(lv) = Self::lead(&v) {
                if lv < c {
                    return false;
                }
            } else {
                return true;
            }
            if v[c].is_zero() {
                continue;
            }
            let (q, r) = v[c].div_rem(&row[c]);
            if !r.is_zero() {
                return false;
            }
            for (x, p) in v.iter_mut().zip(row) {
                *x -= &q * p;
            }
        }
        v.iter().all(|x| x.is_zero())
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.rows
    }
}

/// Order of the subgroup generated by `gens` inside `⊕ Z/o_i` (all `o_i > 0`).
pub fn subgroup_order(orders: &[u64], gens: &[Vec<i64>]) -> u128 {
    let total: u128 = orders.iter().map(|&o| o as u128).product();
    total / quotient_order(orders, gens)
}

/// Order of `(⊕ Z/o_i) / <gens>`.
pub fn quotient_order(orders: &[u64], gens: &[Vec<i64>]) -> u128 {
    let n = orders.len();
    if n == 0 {
        return 1;
    }
    let mut cols: Vec<Vec<i64>> = Vec::with_capacity(n + gens.len());
    for (i, &o) in orders.iter().enumerate() {
        assert!(o > 0, "finite group required");
        let mut e = vec![0; n];
        e[i] = o as i64;
        cols.push(e);
    }
    cols.extend(gens.iter().cloned());
    let m = IntMatrix::from_cols_i64(n, &cols);
    let s = smith_normal_form_partial(&m, false, false);
    s.diagonal().iter().map(|d| d.to_u128().expect("order overflow")).product()
}

/// Structure of the subgroup generated by `gens` in `⊕ Z/o_i` (`0` = free).
pub fn subgroup_structure(orders: &[u64], gens: &[Vec<i64>]) -> FGAbelianGroup {
    // S = <gens> ≅ Z^g / ker, with ker = {c : Σ c_j g_j ∈ relations}
    let n = orders.len();
    let g = gens.len();
    if g == 0 {
        return FGAbelianGroup::zero();
    }
    let rel: Vec<usize> = (0..n).filter(|&i| orders[i] > 0).collect();
    // columns: [gens | -o_i e_i]
    let mut m = IntMatrix::zeros(n, g + rel.len());
    for (j, v) in gens.iter().enumerate() {
        for i in 0..n {
            m.set(i, j, BigInt::from(v[i]));
        }
    }
    for (k, &i) in rel.iter().enumerate() {
        m.set(i, g + k, BigInt::from(-(orders[i] as i64)));
    }
    let s = smith_normal_form(&m);
    let kdim = m.cols - s.rank;
    // kernel columns of v, projected onto the gens block
    let mut ker = IntMatrix::zeros(g, kdim);
    for (c, j) in (s.rank..m.cols).enumerate() {
        for i in 0..g {
            ker.set(i, c, s.v.get(i, j).clone());
        }
    }
    FGAbelianGroup::cokernel(&ker)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_forms() {
        let g = FGAbelianGroup::from_cyclic_orders(&[2, 3, 0]);
        assert_eq!(g, FGAbelianGroup { free_rank: 1, torsion: vec![6] });
        let h = FGAbelianGroup::from_cyclic_orders(&[4, 2, 1]);
        assert_eq!(h.torsion, vec![2, 4]);
        assert_eq!(format!("{h}"), "Z/2 + Z/4");
        assert_eq!(format!("{}", FGAbelianGroup::zero()), "0");
    }

    #[test]
    fn cokernels() {
        let m = IntMatrix::from_rows_i64(&[vec![2]]);
        assert_eq!(FGAbelianGroup::cokernel(&m).torsion, vec![2]);
        let z = IntMatrix::zeros(3, 0);
        assert_eq!(FGAbelianGroup::cokernel(&z), FGAbelianGroup::free(3));
    }

    #[test]
    fn lattice_membership() {
        let l = Lattice::with_relations(&[4, 6], &[vec![2, 3]]);
        assert!(l.contains(&[2, 3]));
        assert!(l.contains(&[4, 0]));
        assert!(l.contains(&[0, 0]));
        assert!(!l.contains(&[1, 0]));
        assert!(l.contains(&[6, 3]));
        assert!(!l.contains(&[2, 0]));
    }

    #[test]
    fn subgroups() {
        assert_eq!(subgroup_order(&[4], &[vec![2]]), 2);
        assert_eq!(subgroup_order(&[3, 3], &[vec![1, 1], vec![2, 2]]), 3);
        assert_eq!(quotient_order(&[3, 3], &[]), 9);
        let s = subgroup_structure(&[4, 2], &[vec![1, 1]]);
        assert_eq!(s, FGAbelianGroup { free_rank: 0, torsion: vec![4] });
        let s = subgroup_structure(&[0, 3], &[vec![2, 1]]);
        assert_eq!(s, FGAbelianGroup::free(1));
    }
}
