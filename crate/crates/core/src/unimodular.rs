//! Non-degenerate unimodular sequences, non-degenerate skew matrices, Gram
//! matrices, normal forms and orbit counts.

use crate::error::{Error, Result};
use crate::group::{FinGroup, DEFAULT_CAP};
use crate::matrix::{pfaffian, RingMatrix};
use crate::ring::Ring;
use crate::symplectic::{form, sp_even_generators};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

/// A skew-symmetric `q × q` matrix stored by its strictly upper triangle, row by row.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<u64>>", try_from = "Vec<Vec<u64>>")]
pub struct SkewMat {
    pub q: usize,
    pub upper: Vec<u64>,
    modulus: u64,
}

impl PartialEq for SkewMat {
    fn eq(&self, o: &Self) -> bool {
        self.q == o.q && self.upper == o.upper
    }
}

impl Eq for SkewMat {}

impl std::hash::Hash for SkewMat {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.q.hash(h);
        self.upper.hash(h);
    }
}

impl PartialOrd for SkewMat {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for SkewMat {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        (self.q, &self.upper).cmp(&(o.q, &o.upper))
    }
}

fn upper_index(q: usize, i: usize, j: usize) -> usize {
    // position of (i, j), i < j, in row-major strict upper triangle
    i * (2 * q - i - 1) / 2 + (j - i - 1)
}

impl SkewMat {
    pub fn new(q: usize, upper: Vec<u64>, r: &Ring) -> Self {
        assert_eq!(upper.len(), q * q.saturating_sub(1) / 2);
        SkewMat { q, upper, modulus: r.modulus }
    }

    pub fn zero(q: usize, r: &Ring) -> Self {
        SkewMat::new(q, vec![0; q * q.saturating_sub(1) / 2], r)
    }

    pub fn from_matrix(a: &RingMatrix, r: &Ring) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare { rows: a.rows, cols: a.cols });
        }
        if !a.is_skew(r) {
            return Err(Error::NotSkew);
        }
        let q = a.rows;
        let mut upper = Vec::new();
        for i in 0..q {
            for j in i + 1..q {
                upper.push(a.get(i, j));
            }
        }
        Ok(SkewMat::new(q, upper, r))
    }

    /// Entry `(i, j)`, 0-based.
    pub fn get(&self, i: usize, j: usize) -> u64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => 0,
            Less => self.upper[upper_index(self.q, i, j)],
            Greater => (self.modulus - self.upper[upper_index(self.q, j, i)]) % self.modulus,
        }
    }

    pub fn to_matrix(&self) -> RingMatrix {
        let mut m = RingMatrix::zeros(self.q, self.q);
        for i in 0..self.q {
            for j in 0..self.q {
                m.set(i, j, self.get(i, j));
            }
        }
        m
    }

    /// Principal submatrix on `idx`.
    pub fn principal(&self, idx: &[usize]) -> SkewMat {
        let mut upper = Vec::new();
        for (a, &i) in idx.iter().enumerate() {
            for &j in &idx[a + 1..] {
                upper.push(self.get(i, j));
            }
        }
        SkewMat { q: idx.len(), upper, modulus: self.modulus }
    }

    /// Deletes row and column `i` (0-based).
    pub fn face(&self, i: usize) -> SkewMat {
        let idx: Vec<usize> = (0..self.q).filter(|&k| k != i).collect();
        self.principal(&idx)
    }
}

impl From<SkewMat> for Vec<Vec<u64>> {
    fn from(s: SkewMat) -> Self {
        (0..s.q).map(|i| (0..s.q).map(|j| s.get(i, j)).collect()).collect()
    }
}

impl TryFrom<Vec<Vec<u64>>> for SkewMat {
    type Error = String;
    fn try_from(rows: Vec<Vec<u64>>) -> std::result::Result<Self, String> {
        let q = rows.len();
        if rows.iter().any(|r| r.len() != q) {
            return Err("not square".into());
        }
        let mut upper = Vec::new();
        for i in 0..q {
            for j in i + 1..q {
                upper.push(rows[i][j]);
            }
        }
        // the modulus is not recorded; antisymmetry fixes it when any entry is nonzero
        let modulus = (0..q)
            .flat_map(|i| (i + 1..q).map(move |j| (i, j)))
            .find(|&(i, j)| rows[i][j] != 0)
            .map_or(u64::MAX, |(i, j)| rows[i][j] + rows[j][i]);
        Ok(SkewMat { q, upper, modulus })
    }
}

/// Subsets of `0..q` of the given size, in lexicographic order.
pub fn subsets(q: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn rec(start: usize, q: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..q {
            if q - i < size - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, q, size, cur, out);
            cur.pop();
        }
    }
    rec(0, q, size, &mut cur, &mut out);
    out
}

fn pf_unit(a: &SkewMat, idx: &[usize], r: &Ring) -> bool {
    let sub = a.principal(idx).to_matrix();
    r.is_unit(pfaffian(&sub, r).expect("even skew submatrix"))
}

/// `det A_I ∈ R*` for every nonempty even `I`; equivalently `Pf(A_I) ∈ R*`.
pub fn is_skew_nondegenerate(a: &SkewMat, r: &Ring) -> bool {
    (2..=a.q).step_by(2).all(|s| subsets(a.q, s).iter().all(|idx| pf_unit(a, idx, r)))
}

/// A sequence of `q` vectors in `R^{2n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UnimodSeq {
    pub n: usize,
    pub vectors: Vec<Vec<u64>>,
}

impl UnimodSeq {
    pub fn new(n: usize, vectors: Vec<Vec<u64>>) -> Self {
        assert!(vectors.iter().all(|v| v.len() == 2 * n));
        UnimodSeq { n, vectors }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `d_i`: deletes vector `i` (0-based).
    pub fn face(&self, i: usize) -> UnimodSeq {
        let mut v = self.vectors.clone();
        v.remove(i);
        UnimodSeq { n: self.n, vectors: v }
    }

    pub fn act(&self, g: &RingMatrix, r: &Ring) -> UnimodSeq {
        UnimodSeq { n: self.n, vectors: self.vectors.iter().map(|v| g.mul_vec(v, r)).collect() }
    }

    /// The `2n × q` matrix with the vectors as columns.
    pub fn matrix(&self) -> RingMatrix {
        RingMatrix::from_cols(2 * self.n, &self.vectors)
    }
}

/// `Γ(v) = ᵗv ψ v`.
pub fn gram(v: &UnimodSeq, r: &Ring) -> SkewMat {
    let q = v.len();
    let mut upper = Vec::with_capacity(q * q.saturating_sub(1) / 2);
    for i in 0..q {
        for j in i + 1..q {
            upper.push(form(&v.vectors[i], &v.vectors[j], r));
        }
    }
    SkewMat::new(q, upper, r)
}

fn residue_independent(vs: &[&[u64]], n2: usize, r: &Ring) -> bool {
    let cols: Vec<Vec<u64>> = vs.iter().map(|v| v.to_vec()).collect();
    RingMatrix::from_cols(n2, &cols).residue_rank(r) == vs.len()
}

/// Unimodularity by residue rank plus invertibility of even Gram minors.
pub fn is_nondeg_unimodular(v: &UnimodSeq, r: &Ring) -> bool {
    let q = v.len();
    let m = q.min(2 * v.n);
    let vs: Vec<&[u64]> = v.vectors.iter().map(|x| x.as_slice()).collect();
    let unimodular = subsets(q, m).iter().all(|idx| {
        let sel: Vec<&[u64]> = idx.iter().map(|&i| vs[i]).collect();
        residue_independent(&sel, 2 * v.n, r)
    });
    unimodular && gram_condition(v, r)
}

/// Even subsets of size `≤ min(q, 2n)` have unit Gram determinant.
pub fn gram_condition(v: &UnimodSeq, r: &Ring) -> bool {
    let m = v.len().min(2 * v.n);
    let g = gram(v, r);
    (2..=m).step_by(2).all(|s| subsets(v.len(), s).iter().all(|idx| pf_unit(&g, idx, r)))
}

/// Flat lexicographically sorted table of sequences of length `q` in `R^{2n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqTable {
    pub n: usize,
    pub q: usize,
    count: usize,
    data: Vec<u16>,
}

impl SeqTable {
    pub fn stride(&self) -> usize {
        self.q * 2 * self.n
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn raw(&self, i: usize) -> &[u16] {
        let s = self.stride();
        &self.data[i * s..(i + 1) * s]
    }

    /// Position of a flat label by binary search.
    pub fn find(&self, key: &[u16]) -> Option<usize> {
        if self.stride() == 0 {
            return (self.count > 0).then_some(0);
        }
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.raw(mid).cmp(key) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn get(&self, i: usize) -> UnimodSeq {
        let n2 = 2 * self.n;
        let raw = self.raw(i);
        let vectors = (0..self.q).map(|j| raw[j * n2..(j + 1) * n2].iter().map(|&x| x as u64).collect()).collect();
        UnimodSeq { n: self.n, vectors }
    }

    pub fn iter(&self) -> impl Iterator<Item = UnimodSeq> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    /// Flat face label: vector `j` removed.
    pub fn face_key(&self, i: usize, j: usize) -> Vec<u16> {
        let n2 = 2 * self.n;
        let raw = self.raw(i);
        let mut k = Vec::with_capacity(raw.len() - n2);
        k.extend_from_slice(&raw[..j * n2]);
        k.extend_from_slice(&raw[(j + 1) * n2..]);
        k
    }

    pub fn write_lines<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        for s in self.iter() {
            writeln!(w, "{}", serde_json::to_string(&s.vectors)?)?;
        }
        Ok(())
    }

    pub fn read_lines<B: BufRead>(n: usize, q: usize, rd: B) -> std::io::Result<SeqTable> {
        let mut data = Vec::new();
        let mut count = 0usize;
        for line in rd.lines() {
            let vs: Vec<Vec<u64>> = serde_json::from_str(&line?)?;
            data.extend(vs.iter().flatten().map(|&x| x as u16));
            count += 1;
        }
        Ok(SeqTable { n, q, count, data })
    }
}

pub fn key_of(v: &UnimodSeq) -> Vec<u16> {
    v.vectors.iter().flatten().map(|&x| x as u16).collect()
}

/// Whether appending `v` to a good prefix keeps the sequence non-degenerate unimodular.
#[cfg(test)]
fn extends(prefix: &[Vec<u64>], v: &[u64], n: usize, r: &Ring) -> bool {
    let k = prefix.len() + 1;
    let m = k.min(2 * n);
    if m == 0 {
        return true;
    }
    // independence of every m-subset containing the new vector
    let indep = subsets(k - 1, m - 1).iter().all(|idx| {
        let mut sel: Vec<&[u64]> = idx.iter().map(|&i| prefix[i].as_slice()).collect();
        sel.push(v);
        residue_independent(&sel, 2 * n, r)
    });
    if !indep {
        return false;
    }
    // even subsets containing the new vector
    let mut all: Vec<Vec<u64>> = prefix.to_vec();
    all.push(v.to_vec());
    let g = gram(&UnimodSeq { n, vectors: all }, r);
    (2..=m).step_by(2).all(|s| {
        subsets(k - 1, s - 1).iter().all(|idx| {
            let mut full = idx.clone();
            full.push(k - 1);
            pf_unit(&g, &full, r)
        })
    })
}

fn all_vectors(n2: usize, r: &Ring) -> Vec<Vec<u64>> {
    let total = (r.modulus as usize).pow(n2 as u32);
    (0..total)
        .map(|mut x| {
            let mut v = vec![0u64; n2];
            for c in (0..n2).rev() {
                v[c] = (x % r.modulus as usize) as u64;
                x /= r.modulus as usize;
            }
            v
        })
        .collect()
}

/// Cap on stored sequence tables (a table of `U₄(F₃⁴)` has about 2.5 million rows).
pub const SEQ_CAP: usize = 4_000_000;

/// Indexed form of the extension test: vectors by index, the form as a table.
struct Extender {
    n: usize,
    r: Ring,
    vecs: Vec<Vec<u64>>,
    omega: Vec<u64>,
    subs: Vec<Vec<Vec<Vec<usize>>>>,
}

impl Extender {
    fn new(q: usize, n: usize, r: &Ring) -> Self {
        let vecs = all_vectors(2 * n, r);
        let nv = vecs.len();
        let omega: Vec<u64> =
            (0..nv * nv).into_par_iter().map(|ij| form(&vecs[ij / nv], &vecs[ij % nv], r)).collect();
        let subs = (0..q.max(1)).map(|a| (0..=a).map(|b| subsets(a, b)).collect()).collect();
        Extender { n, r: r.clone(), vecs, omega, subs }
    }

    fn w(&self, i: u32, j: u32) -> u64 {
        self.omega[i as usize * self.vecs.len() + j as usize]
    }

    fn pf(&self, idx: &[u32]) -> u64 {
        let r = &self.r;
        match idx.len() {
            0 => 1,
            2 => self.w(idx[0], idx[1]),
            4 => {
                let [a, b, c, d] = [idx[0], idx[1], idx[2], idx[3]];
                let t1 = r.mul(self.w(a, b), self.w(c, d));
                let t2 = r.mul(self.w(a, c), self.w(b, d));
                let t3 = r.mul(self.w(a, d), self.w(b, c));
                r.add(r.sub(t1, t2), t3)
            }
            len => {
                let mut acc = 0;
                let mut rest = [0u32; 32];
                for j in 1..len {
                    let mut k = 0;
                    for (t, &x) in idx.iter().enumerate().skip(1) {
                        if t != j {
                            rest[k] = x;
                            k += 1;
                        }
                    }
                    let term = r.mul(self.w(idx[0], idx[j]), self.pf(&rest[..k]));
                    acc = if j % 2 == 1 { r.add(acc, term) } else { r.sub(acc, term) };
                }
                acc
            }
        }
    }

    fn independent(&self, sel: &[u32]) -> bool {
        let cols: Vec<Vec<u64>> = sel.iter().map(|&i| self.vecs[i as usize].clone()).collect();
        RingMatrix::from_cols(2 * self.n, &cols).residue_rank(&self.r) == sel.len()
    }

    /// Same test as `extends`, assuming every pair with `v` already has unit form.
    fn ok(&self, prefix: &[u32], v: u32) -> bool {
        let k = prefix.len() + 1;
        let m = k.min(2 * self.n);
        if m == 0 {
            return true;
        }
        if m == 1 {
            return self.vecs[v as usize].iter().any(|&x| x % self.r.p != 0);
        }
        let pick = |idx: &[usize]| -> Vec<u32> {
            let mut sel: Vec<u32> = idx.iter().map(|&i| prefix[i]).collect();
            sel.push(v);
            sel
        };
        let pf_unit = |idx: &[usize]| -> bool {
            let mut sel = [0u32; 32];
            for (t, &i) in idx.iter().enumerate() {
                sel[t] = prefix[i];
            }
            sel[idx.len()] = v;
            self.r.is_unit(self.pf(&sel[..=idx.len()]))
        };
        // for even m, a unit Pfaffian on the same subset already forces independence
        if m % 2 == 1 && !self.subs[k - 1][m - 1].iter().all(|idx| self.independent(&pick(idx))) {
            return false;
        }
        (4..=m).step_by(2).all(|s| self.subs[k - 1][s - 1].iter().all(|idx| pf_unit(idx)))
    }

    fn roots(&self) -> Vec<u32> {
        (0..self.vecs.len() as u32).filter(|&v| self.ok(&[], v)).collect()
    }

    fn narrow(&self, cands: &[u32], v: u32) -> Vec<u32> {
        if self.n == 0 {
            return cands.to_vec();
        }
        cands.iter().copied().filter(|&w| self.r.is_unit(self.w(v, w))).collect()
    }

    fn walk(&self, prefix: &mut Vec<u32>, cands: &[u32], q: usize, f: &mut dyn FnMut(&[u32]) -> Result<()>) -> Result<()> {
        if prefix.len() == q {
            return f(prefix);
        }
        for &c in cands {
            if self.ok(prefix, c) {
                let next = self.narrow(cands, c);
                prefix.push(c);
                self.walk(prefix, &next, q, f)?;
                prefix.pop();
            }
        }
        Ok(())
    }
}

/// `U_q(R^{2n})` in lexicographic order.
pub fn enumerate_u(q: usize, n: usize, r: &Ring, cap: usize) -> Result<SeqTable> {
    if q == 0 {
        return Ok(SeqTable { n, q, count: 1, data: vec![] });
    }
    let ext = Extender::new(q, n, r);
    let all: Vec<u32> = (0..ext.vecs.len() as u32).collect();
    let counter = std::sync::atomic::AtomicUsize::new(0);
    let parts: Vec<Result<Vec<u16>>> = ext
        .roots()
        .par_iter()
        .map(|&v0| {
            let mut out = Vec::new();
            let mut prefix = vec![v0];
            let next = ext.narrow(&all, v0);
            ext.walk(&mut prefix, &next, q, &mut |seq| {
                if counter.fetch_add(1, std::sync::atomic::Ordering::Relaxed) >= cap {
                    return Err(Error::CapExceeded(cap));
                }
                out.extend(seq.iter().flat_map(|&i| ext.vecs[i as usize].iter().map(|&x| x as u16)));
                Ok(())
            })?;
            Ok(out)
        })
        .collect();
    let mut data = Vec::new();
    for p in parts {
        data.extend(p?);
    }
    let count = data.len() / (q * 2 * n).max(1);
    let count = if n == 0 { 1 } else { count };
    Ok(SeqTable { n, q, count, data })
}

/// Calls `f` on every element of `U_q(R^{2n})` in lexicographic order, without storing them.
pub fn for_each_u(q: usize, n: usize, r: &Ring, f: &mut dyn FnMut(&[Vec<u64>])) {
    let ext = Extender::new(q, n, r);
    let all: Vec<u32> = (0..ext.vecs.len() as u32).collect();
    let _ = ext.walk(&mut Vec::new(), &all, q, &mut |seq| {
        let vs: Vec<Vec<u64>> = seq.iter().map(|&i| ext.vecs[i as usize].clone()).collect();
        f(&vs);
        Ok(())
    });
}

/// Parallel streaming by vector index: `f(indices, vectors)` with `vectors` the
/// lexicographic list of all of `R^{2n}`.
pub fn par_for_each_u_indexed(q: usize, n: usize, r: &Ring, f: &(dyn Fn(&[u32], &[Vec<u64>]) + Sync)) {
    let ext = Extender::new(q, n, r);
    if q == 0 {
        f(&[], &ext.vecs);
        return;
    }
    let all: Vec<u32> = (0..ext.vecs.len() as u32).collect();
    ext.roots().par_iter().for_each(|&v0| {
        let next = ext.narrow(&all, v0);
        let _ = ext.walk(&mut vec![v0], &next, q, &mut |seq| {
            f(seq, &ext.vecs);
            Ok(())
        });
    });
}

/// Parallel form of `for_each_u`, split by first vector; `f` must be thread-safe.
pub fn par_for_each_u(q: usize, n: usize, r: &Ring, f: &(dyn Fn(&[Vec<u64>]) + Sync)) {
    if q == 0 {
        f(&[]);
        return;
    }
    let ext = Extender::new(q, n, r);
    let all: Vec<u32> = (0..ext.vecs.len() as u32).collect();
    ext.roots().par_iter().for_each(|&v0| {
        let next = ext.narrow(&all, v0);
        let _ = ext.walk(&mut vec![v0], &next, q, &mut |seq| {
            let vs: Vec<Vec<u64>> = seq.iter().map(|&i| ext.vecs[i as usize].clone()).collect();
            f(&vs);
            Ok(())
        });
    });
}

/// `Skew⁺_q(R)` in lexicographic order of the upper triangle.
pub fn enumerate_skew_plus(q: usize, r: &Ring, cap: usize) -> Result<Vec<SkewMat>> {
    let e = q * q.saturating_sub(1) / 2;
    let total = (r.modulus as u128).pow(e as u32);
    if total > (cap as u128) * 1000 {
        return Err(Error::CapExceeded(cap));
    }
    let out: Vec<SkewMat> = (0..total as u64)
        .into_par_iter()
        .filter_map(|mut x| {
            let mut upper = vec![0u64; e];
            for c in (0..e).rev() {
                upper[c] = x % r.modulus;
                x /= r.modulus;
            }
            let a = SkewMat::new(q, upper, r);
            is_skew_nondegenerate(&a, r).then_some(a)
        })
        .collect();
    if out.len() > cap {
        return Err(Error::CapExceeded(cap));
    }
    Ok(out)
}

/// A sequence `u` in normal form with `Γ(u) = A`.
pub fn normal_form(a: &SkewMat, n: usize, r: &Ring) -> Result<UnimodSeq> {
    let q = a.q;
    if q > 2 * n + 1 {
        return Err(Error::RankBound { q, bound: 2 * n + 1 });
    }
    if !is_skew_nondegenerate(a, r) {
        return Err(Error::NotNondegenerate);
    }
    let n2 = 2 * n;
    let mut us: Vec<Vec<u64>> = Vec::with_capacity(q);
    for k in 0..q {
        // building u_{k+1} from u_1..u_k (1-based), k = current length
        let mut u = vec![0u64; n2];
        if k == 0 {
            if n2 > 0 {
                u[0] = 1 % r.modulus;
            }
        } else if k % 2 == 0 {
            let x = solve_pairings(&us, k, a, k, r)?;
            u[..k].copy_from_slice(&x);
            if k < n2 {
                u[k] = 1 % r.modulus;
            }
        } else {
            let x = solve_pairings(&us[..k - 1], k - 1, a, k, r)?;
            u[..k - 1].copy_from_slice(&x);
            let mut xv = vec![0u64; n2];
            xv[..k - 1].copy_from_slice(&x);
            let alpha = r.sub(a.get(k - 1, k), form(&us[k - 1], &xv, r));
            u[k] = alpha;
        }
        us.push(u);
    }
    Ok(UnimodSeq { n, vectors: us })
}

/// Solves `⟨u_i, x⟩ = A_{i, col}` for `x` supported on the first `m` coordinates.
fn solve_pairings(us: &[Vec<u64>], m: usize, a: &SkewMat, col: usize, r: &Ring) -> Result<Vec<u64>> {
    // row i: ᵗu_i ψ restricted to the first m coordinates
    let mut rows = RingMatrix::zeros(m, m);
    for (i, u) in us.iter().enumerate() {
        for j in 0..m {
            let mut ej = vec![0u64; u.len()];
            ej[j] = 1 % r.modulus;
            rows.set(i, j, form(u, &ej, r));
        }
    }
    let b: Vec<u64> = (0..m).map(|i| a.get(i, col)).collect();
    rows.solve(&b, r).ok_or(Error::NotNondegenerate)
}

/// Checks the normal-form clauses: upper triangular, `(u_i)_i = 1` for odd `i`,
/// `(u_i)_{i−1} = 0` for even `i` (1-based).
pub fn is_normal_form(u: &UnimodSeq, r: &Ring) -> bool {
    u.vectors.iter().enumerate().all(|(k, v)| {
        let upper = v.iter().enumerate().all(|(c, &x)| c <= k || x == 0);
        let i = k + 1;
        let diag = if i % 2 == 1 { k >= v.len() || v[k] == 1 % r.modulus } else { v[k - 1] == 0 };
        upper && diag
    })
}

/// Union-find with path halving.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect() }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = p;
            x = p;
        }
        x
    }

    pub fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }

    pub fn classes(&mut self) -> usize {
        (0..self.parent.len() as u32).filter(|&x| self.find(x) == x).count()
    }
}

/// `(number of Sp_{2n}(R)-orbits on U_q(R^{2n}), |Skew⁺_q(R)|)`.
pub fn orbit_count(q: usize, n: usize, r: &Ring) -> Result<(usize, usize)> {
    let table = enumerate_u(q, n, r, DEFAULT_CAP)?;
    let gens = sp_even_generators(n, r);
    let mut uf = UnionFind::new(table.len());
    for g in &gens {
        let images: Vec<u32> = (0..table.len())
            .into_par_iter()
            .map(|i| table.find(&key_of(&table.get(i).act(g, r))).expect("Sp preserves U_q") as u32)
            .collect();
        for (i, &j) in images.iter().enumerate() {
            uf.union(i as u32, j);
        }
    }
    let orbits = uf.classes();
    let skew = enumerate_skew_plus(q, r, DEFAULT_CAP)?.len();
    Ok((orbits, skew))
}

/// Enumerated `Sp_{2n}(R)`, for exhaustive invariance checks.
pub fn sp_even_group(n: usize, r: &Ring) -> Result<FinGroup> {
    FinGroup::enumerate(&sp_even_generators(n, r), r, DEFAULT_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Ring {
        Ring::prime_field(3).unwrap()
    }

    fn naive_u(q: usize, n: usize, r: &Ring) -> Vec<u16> {
        let vecs = all_vectors(2 * n, r);
        let mut seqs: Vec<Vec<Vec<u64>>> = vec![vec![]];
        for _ in 0..q {
            seqs = seqs
                .into_iter()
                .flat_map(|p| {
                    vecs.iter()
                        .filter(|v| extends(&p, v, n, r))
                        .map(|v| {
                            let mut x = p.clone();
                            x.push(v.clone());
                            x
                        })
                        .collect::<Vec<_>>()
                })
                .collect();
        }
        seqs.iter().flatten().flatten().map(|&x| x as u16).collect()
    }

    #[test]
    fn enumeration_matches_naive() {
        for (s, n, qmax) in [("3", 1, 4), ("2^2", 1, 3), ("5", 1, 3), ("3", 2, 3)] {
            let r = Ring::parse(s).unwrap();
            for q in 1..=qmax {
                let t = enumerate_u(q, n, &r, DEFAULT_CAP).unwrap();
                assert_eq!(t.data, naive_u(q, n, &r), "{s} n={n} q={q}");
                let mut streamed = 0;
                for_each_u(q, n, &r, &mut |_| streamed += 1);
                assert_eq!(streamed, t.len());
            }
        }
    }

    #[test]
    fn skew_examples() {
        let r = f3();
        let psi = SkewMat::new(2, vec![1], &r);
        assert!(is_skew_nondegenerate(&psi, &r));
        assert!(is_skew_nondegenerate(&SkewMat::zero(1, &r), &r));
        assert!(!is_skew_nondegenerate(&SkewMat::zero(2, &r), &r));
        let m = psi.to_matrix();
        assert_eq!(SkewMat::from_matrix(&m, &r).unwrap(), psi);
        let a = SkewMat::new(3, vec![1, 2, 1], &r);
        assert_eq!(a.face(1), SkewMat::new(2, vec![2], &r));
    }

    #[test]
    fn gram_examples() {
        let r = f3();
        let v = UnimodSeq::new(1, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(gram(&v, &r), SkewMat::new(2, vec![1], &r));
        assert_eq!(gram(&UnimodSeq::new(2, vec![vec![1, 0, 0, 0]]), &r), SkewMat::zero(1, &r));
        let w = UnimodSeq::new(2, vec![vec![1, 0, 0, 0], vec![0, 0, 1, 0]]);
        assert_eq!(gram(&w, &r), SkewMat::zero(2, &r));
    }

    #[test]
    fn unimodular_examples() {
        let r = f3();
        assert!(is_nondeg_unimodular(&UnimodSeq::new(1, vec![vec![1, 0], vec![0, 1]]), &r));
        let z9 = Ring::parse("3^2").unwrap();
        assert!(is_nondeg_unimodular(&UnimodSeq::new(1, vec![vec![3, 1]]), &z9));
        assert!(!is_nondeg_unimodular(&UnimodSeq::new(1, vec![vec![3, 3]]), &z9));
    }

    #[test]
    fn counts() {
        let r = f3();
        assert_eq!(enumerate_u(0, 1, &r, DEFAULT_CAP).unwrap().len(), 1);
        let sizes: Vec<usize> = (1..=5).map(|q| enumerate_u(q, 1, &r, DEFAULT_CAP).unwrap().len()).collect();
        assert_eq!(sizes, vec![8, 48, 192, 384, 0]);
        for q in 1..=4 {
            let t = enumerate_u(q, 1, &r, DEFAULT_CAP).unwrap();
            for s in t.iter() {
                assert!(is_nondeg_unimodular(&s, &r));
            }
            for i in 1..t.len() {
                assert!(t.raw(i - 1) < t.raw(i));
            }
        }
    }

    #[test]
    fn normal_forms() {
        let r = f3();
        let u = normal_form(&SkewMat::zero(1, &r), 1, &r).unwrap();
        assert_eq!(u.vectors, vec![vec![1, 0]]);
        for a in 1..3 {
            let u = normal_form(&SkewMat::new(2, vec![a], &r), 1, &r).unwrap();
            assert_eq!(u.vectors, vec![vec![1, 0], vec![0, a]]);
        }
        let all = enumerate_skew_plus(3, &r, DEFAULT_CAP).unwrap();
        assert_eq!(all.len(), 8);
        for a in &all {
            let u = normal_form(a, 1, &r).unwrap();
            assert_eq!(&gram(&u, &r), a);
            assert!(is_normal_form(&u, &r));
        }
        assert_eq!(normal_form(&SkewMat::zero(2, &r), 1, &r), Err(Error::NotNondegenerate));
        assert_eq!(
            normal_form(&SkewMat::zero(1, &r), 0, &r).map(|u| u.len()),
            Ok(1)
        );
    }

    #[test]
    fn orbits() {
        let r = f3();
        assert_eq!(orbit_count(1, 1, &r).unwrap(), (1, 1));
        assert_eq!(orbit_count(2, 1, &r).unwrap(), (2, 2));
        assert_eq!(orbit_count(3, 1, &r).unwrap(), (8, 8));
    }

    #[test]
    fn persistence() {
        let r = f3();
        let t = enumerate_u(2, 1, &r, DEFAULT_CAP).unwrap();
        let mut buf = Vec::new();
        t.write_lines(&mut buf).unwrap();
        let back = SeqTable::read_lines(1, 2, buf.as_slice()).unwrap();
        assert_eq!(back, t);
        let s = SkewMat::new(2, vec![1], &r);
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, "[[0,1],[2,0]]");
        let back: SkewMat = serde_json::from_str(&js).unwrap();
        assert_eq!(back.upper, s.upper);
    }
}
