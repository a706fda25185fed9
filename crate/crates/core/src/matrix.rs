//! Dense matrices over a local ring.

use crate::error::{Error, Result};
use crate::ring::Ring;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RingMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl RingMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RingMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(r: &Ring, rows: &[Vec<i64>]) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(nr * nc);
        for row in rows {
            assert_eq!(row.len(), nc, "ragged rows");
            data.extend(row.iter().map(|&x| r.reduce(x)));
        }
        RingMatrix { rows: nr, cols: nc, data }
    }

    pub fn from_cols(rows: usize, cols: &[Vec<u64>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for i in 0..rows {
                m.data[i * m.cols + j] = c[i];
            }
        }
        m
    }

    pub fn diag(entries: &[u64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * n + i] = e;
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn col(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row(&self, i: usize) -> Vec<u64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &RingMatrix, r: &Ring) -> RingMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        let m = r.modulus;
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] = (out.data[idx] + a * other.get(k, j)) % m;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u64], r: &Ring) -> Vec<u64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(0, |acc, j| (acc + self.get(i, j) * v[j]) % r.modulus)
            })
            .collect()
    }

    pub fn scale(&self, a: u64, r: &Ring) -> RingMatrix {
        RingMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| r.mul(x, a)).collect(),
        }
    }

    pub fn neg(&self, r: &Ring) -> RingMatrix {
        RingMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| r.neg(x)).collect(),
        }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &RingMatrix) -> RingMatrix {
        let mut m = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m.set(self.rows + i, self.cols + j, other.get(i, j));
            }
        }
        m
    }

    /// Rows and columns indexed by `rows`/`cols`.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> RingMatrix {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j));
            }
        }
        m
    }

    pub fn principal(&self, idx: &[usize]) -> RingMatrix {
        self.submatrix(idx, idx)
    }

    pub fn is_skew(&self, r: &Ring) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                self.get(i, i) == 0 && (0..i).all(|j| self.get(i, j) == r.neg(self.get(j, i)))
            })
    }

    /// Rank of the reduction modulo the maximal ideal.
    pub fn residue_rank(&self, r: &Ring) -> usize {
        let p = r.p;
        let mut a: Vec<u64> = self.data.iter().map(|&x| x % p).collect();
        let (nr, nc) = (self.rows, self.cols);
        let mut rank = 0;
        for c in 0..nc {
            let Some(piv) = (rank..nr).find(|&i| a[i * nc + c] != 0) else {
                continue;
            };
            for j in 0..nc {
                a.swap(piv * nc + j, rank * nc + j);
            }
            let inv = modinv(a[rank * nc + c], p);
            for i in 0..nr {
                if i != rank && a[i * nc + c] != 0 {
                    let f = a[i * nc + c] * inv % p;
                    for j in 0..nc {
                        a[i * nc + j] = (a[i * nc + j] + p * p - f * a[rank * nc + j] % p) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Inverse over a local ring; `None` when the matrix is singular.
    pub fn inverse(&self, r: &Ring) -> Option<RingMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let piv = (c..n).find(|&i| r.is_unit(a.get(i, c)))?;
            for j in 0..n {
                a.data.swap(piv * n + j, c * n + j);
                inv.data.swap(piv * n + j, c * n + j);
            }
            let s = r.inv(a.get(c, c)).ok()?;
            for j in 0..n {
                a.set(c, j, r.mul(a.get(c, j), s));
                inv.set(c, j, r.mul(inv.get(c, j), s));
            }
            for i in 0..n {
                let f = a.get(i, c);
                if i != c && f != 0 {
                    for j in 0..n {
                        a.set(i, j, r.sub(a.get(i, j), r.mul(f, a.get(c, j))));
                        inv.set(i, j, r.sub(inv.get(i, j), r.mul(f, inv.get(c, j))));
                    }
                }
            }
        }
        Some(inv)
    }

    /// Solves `self · x = b` for invertible `self`.
    pub fn solve(&self, b: &[u64], r: &Ring) -> Option<Vec<u64>> {
        Some(self.inverse(r)?.mul_vec(b, r))
    }
}

fn modinv(a: u64, p: u64) -> u64 {
    let mut acc = 1;
    let (mut base, mut e) = (a % p, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Exact determinant: fraction-free Bareiss elimination over the integers on
/// centered lifts, reduced at the end.
pub fn det(m: &RingMatrix, r: &Ring) -> Result<u64> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    if n == 0 {
        return Ok(1 % r.modulus);
    }
    let lifts: Vec<i128> = m.data.iter().map(|&x| r.centered(x) as i128).collect();
    let d = match bareiss_i128(lifts, n) {
        Some(d) => d.rem_euclid(r.modulus as i128) as u64,
        None => {
            let lifts: Vec<BigInt> = m.data.iter().map(|&x| BigInt::from(r.centered(x))).collect();
            bareiss_big(lifts, n).mod_floor(&BigInt::from(r.modulus)).to_u64().unwrap()
        }
    };
    Ok(d)
}

fn bareiss_i128(mut a: Vec<i128>, n: usize) -> Option<i128> {
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k * n + k] == 0 {
            let Some(s) = (k + 1..n).find(|&i| a[i * n + k] != 0) else {
                return Some(0);
            };
            for j in 0..n {
                a.swap(k * n + j, s * n + j);
            }
            sign = -sign;
        }
        let piv = a[k * n + k];
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i * n + j].checked_mul(piv)?.checked_sub(a[i * n + k].checked_mul(a[k * n + j])?)?;
                a[i * n + j] = v / prev;
            }
            a[i * n + k] = 0;
        }
        prev = piv;
    }
    Some(sign * a[n * n - 1])
}

fn bareiss_big(mut a: Vec<BigInt>, n: usize) -> BigInt {
    let mut neg = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            let Some(s) = (k + 1..n).find(|&i| !a[i * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for j in 0..n {
                a.swap(k * n + j, s * n + j);
            }
            neg = !neg;
        }
        let piv = a[k * n + k].clone();
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i * n + j] * &piv - &a[i * n + k] * &a[k * n + j];
                a[i * n + j] = v / &prev;
            }
            a[i * n + k] = BigInt::zero();
        }
        prev = piv;
    }
    let d = a[n * n - 1].clone();
    if neg {
        -d
    } else {
        d
    }
}

/// Pfaffian by expansion along the first row.
pub fn pfaffian(a: &RingMatrix, r: &Ring) -> Result<u64> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows, cols: a.cols });
    }
    if !a.is_skew(r) {
        return Err(Error::NotSkew);
    }
    if a.rows % 2 == 1 {
        return Err(Error::OddSize(a.rows));
    }
    let idx: Vec<usize> = (0..a.rows).collect();
    Ok(pf_rec(a, &idx, r))
}

fn pf_rec(a: &RingMatrix, idx: &[usize], r: &Ring) -> u64 {
    if idx.is_empty() {
        return 1 % r.modulus;
    }
    let first = idx[0];
    let mut acc = 0;
    let mut rest: Vec<usize> = Vec::with_capacity(idx.len() - 2);
    for pos in 1..idx.len() {
        let e = a.get(first, idx[pos]);
        if e == 0 {
            continue;
        }
        rest.clear();
        rest.extend(idx[1..].iter().enumerate().filter(|(q, _)| q + 1 != pos).map(|(_, &x)| x));
        let term = r.mul(e, pf_rec(a, &rest, r));
        acc = if pos % 2 == 1 { r.add(acc, term) } else { r.sub(acc, term) };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::make_local_ring;

    fn psi(n: usize) -> RingMatrix {
        let mut m = RingMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            m.set(2 * i, 2 * i + 1, 1);
            m.set(2 * i + 1, 2 * i, 4);
        }
        m
    }

    #[test]
    fn small_determinants() {
        let r = make_local_ring(5, 1).unwrap();
        assert_eq!(det(&psi(1), &r), Ok(1));
        assert_eq!(det(&RingMatrix::identity(4), &r), Ok(1));
        let a = 3;
        let m = RingMatrix::from_rows(&r, &[vec![0, a], vec![-a, 0]]);
        assert_eq!(det(&m, &r), Ok(r.mul(3, 3)));
        assert_eq!(pfaffian(&m, &r), Ok(3));
        assert_eq!(pfaffian(&psi(1), &r), Ok(1));
        assert_eq!(pfaffian(&psi(2), &r), Ok(1));
        assert_eq!(det(&RingMatrix::zeros(2, 3), &r), Err(Error::NotSquare { rows: 2, cols: 3 }));
        assert_eq!(pfaffian(&RingMatrix::zeros(3, 3), &r), Err(Error::OddSize(3)));
        assert_eq!(pfaffian(&RingMatrix::identity(2), &r), Err(Error::NotSkew));
        assert_eq!(pfaffian(&RingMatrix::zeros(0, 0), &r), Ok(1));
    }

    #[test]
    fn inverse_and_rank() {
        let r = make_local_ring(3, 2).unwrap();
        let m = RingMatrix::from_rows(&r, &[vec![1, 3], vec![3, 1]]);
        let inv = m.inverse(&r).unwrap();
        assert_eq!(m.mul(&inv, &r), RingMatrix::identity(2));
        let sing = RingMatrix::from_rows(&r, &[vec![3, 0], vec![0, 1]]);
        assert!(sing.inverse(&r).is_none());
        assert_eq!(sing.residue_rank(&r), 1);
        assert_eq!(det(&sing, &r), Ok(3));
    }
}
