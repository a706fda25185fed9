//! Integer matrices and Smith normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows_i64(rows: &[Vec<i64>]) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(nr, nc);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), nc, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m.data[i * nc + j] = BigInt::from(x);
            }
        }
        m
    }

    pub fn from_cols_i64(rows: usize, cols: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                m.data[i * m.cols + j] = BigInt::from(x);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn get_i64(&self, i: usize, j: usize) -> i64 {
        i64::try_from(self.get(i, j)).expect("entry exceeds i64")
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        out.data[i * o.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn col_i64(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get_i64(i, j)).collect()
    }

    /// Determinant by Bareiss elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                let Some(s) = (k + 1..n).find(|&i| !a[i * n + k].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    a.swap(k * n + j, s * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * &a[n * n - 1]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += q * row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * q;
            if !v.is_zero() {
                self.data[dst * self.cols + j] += v;
            }
        }
    }

    /// col[dst] += q * col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * q;
            if !v.is_zero() {
                self.data[i * self.cols + dst] += v;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = v;
        }
    }
}

/// Result of a Smith normal form computation with `u · m · v = d`.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
    pub rank: usize,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.get(i, i).clone()).collect()
    }
}

#[derive(Clone, Copy)]
struct Track {
    u: bool,
    v: bool,
}

struct State {
    a: IntMatrix,
    u: IntMatrix,
    ui: IntMatrix,
    v: IntMatrix,
    vi: IntMatrix,
    tr: Track,
}

impl State {
    fn swap_rows(&mut self, x: usize, y: usize) {
        self.a.swap_rows(x, y);
        if self.tr.u {
            self.u.swap_rows(x, y);
            self.ui.swap_cols(x, y);
        }
    }
    fn swap_cols(&mut self, x: usize, y: usize) {
        self.a.swap_cols(x, y);
        if self.tr.v {
            self.v.swap_cols(x, y);
            self.vi.swap_rows(x, y);
        }
    }
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        self.a.add_row(dst, src, q);
        if self.tr.u {
            self.u.add_row(dst, src, q);
            self.ui.add_col(src, dst, &-q);
        }
    }
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        self.a.add_col(dst, src, q);
        if self.tr.v {
            self.v.add_col(dst, src, q);
            self.vi.add_row(src, dst, &-q);
        }
    }
    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        if self.tr.u {
            self.u.negate_row(i);
            self.ui.negate_col(i);
        }
    }
}

fn snf_impl(m: &IntMatrix, tr: Track) -> Snf {
    let (nr, nc) = (m.rows, m.cols);
    let mut s = State {
        a: m.clone(),
        u: if tr.u { IntMatrix::identity(nr) } else { IntMatrix::zeros(0, 0) },
        ui: if tr.u { IntMatrix::identity(nr) } else { IntMatrix::zeros(0, 0) },
        v: if tr.v { IntMatrix::identity(nc) } else { IntMatrix::zeros(0, 0) },
        vi: if tr.v { IntMatrix::identity(nc) } else { IntMatrix::zeros(0, 0) },
        tr,
    };
    let mut t = 0;
    while t < nr.min(nc) {
        // smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                let x = s.a.get(i, j);
                if !x.is_zero() {
                    let better = match best {
                        None => true,
                        Some((bi, bj)) => x.abs() < s.a.get(bi, bj).abs(),
                    };
                    if better {
                        best = Some((i, j));
                        if x.abs().is_one() {
                            break;
                        }
                    }
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        s.swap_rows(t, bi);
        s.swap_cols(t, bj);
        loop {
            let mut dirty = false;
            for i in t + 1..nr {
                if s.a.get(i, t).is_zero() {
                    continue;
                }
                let q = s.a.get(i, t).div_floor(s.a.get(t, t));
                s.add_row(i, t, &-q);
                if !s.a.get(i, t).is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..nc {
                if s.a.get(t, j).is_zero() {
                    continue;
                }
                let q = s.a.get(t, j).div_floor(s.a.get(t, t));
                s.add_col(j, t, &-q);
                if !s.a.get(t, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // move the smallest remainder in row/column t to the pivot
                let mut bi = t;
                let mut bj = t;
                let mut bv = s.a.get(t, t).abs();
                for i in t + 1..nr {
                    let x = s.a.get(i, t).abs();
                    if !x.is_zero() && x < bv {
                        (bi, bj, bv) = (i, t, x);
                    }
                }
                for j in t + 1..nc {
                    let x = s.a.get(t, j).abs();
                    if !x.is_zero() && x < bv {
                        (bi, bj, bv) = (t, j, x);
                    }
                }
                s.swap_rows(t, bi);
                s.swap_cols(t, bj);
                continue;
            }
            let piv = s.a.get(t, t).clone();
            let mut bad = None;
            'outer: for i in t + 1..nr {
                for j in t + 1..nc {
                    if !s.a.get(i, j).is_multiple_of(&piv) {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => s.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if s.a.get(t, t).is_negative() {
            s.negate_row(t);
        }
        t += 1;
    }
    Snf { u: s.u, d: s.a, v: s.v, u_inv: s.ui, v_inv: s.vi, rank: t }
}

/// Smith normal form with unimodular transforms and their inverses.
pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    snf_impl(m, Track { u: true, v: true })
}

/// Smith normal form tracking only the requested transforms.
pub fn smith_normal_form_partial(m: &IntMatrix, track_u: bool, track_v: bool) -> Snf {
    snf_impl(m, Track { u: track_u, v: track_v })
}

/// Invariant factors (nonzero diagonal entries, ones included).
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    let s = snf_impl(m, Track { u: false, v: false });
    s.diagonal().into_iter().filter(|x| !x.is_zero()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix) {
        let s = smith_normal_form(m);
        assert_eq!(s.u.mul(m).mul(&s.v), s.d);
        assert!(s.u.det().abs().is_one());
        assert!(s.v.det().abs().is_one());
        assert_eq!(s.u.mul(&s.u_inv), IntMatrix::identity(m.rows));
        assert_eq!(s.v.mul(&s.v_inv), IntMatrix::identity(m.cols));
        let d = s.diagonal();
        for w in d.windows(2) {
            if !w[1].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]));
            } else {
                assert!(w[1].is_zero());
            }
        }
    }

    #[test]
    fn diag_2_3() {
        let m = IntMatrix::from_rows_i64(&[vec![2, 0], vec![0, 3]]);
        check(&m);
        let d = smith_normal_form(&m).diagonal();
        assert_eq!(d, vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn trivial_cases() {
        let z = IntMatrix::zeros(3, 2);
        assert!(smith_normal_form(&z).d.is_zero());
        let one = IntMatrix::from_rows_i64(&[vec![2]]);
        assert_eq!(smith_normal_form(&one).d, one);
        check(&IntMatrix::zeros(0, 4));
    }

    #[test]
    fn mixed() {
        let m = IntMatrix::from_rows_i64(&[
            vec![4, 6, 2, 0],
            vec![-2, 10, 8, 14],
            vec![6, 4, 0, 12],
        ]);
        check(&m);
    }
}
