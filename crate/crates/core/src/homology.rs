//! Homology of chain complexes of free abelian groups.
//!
//! Boundaries are reduced by a sparse lattice reducer that only pivots on
//! entries `±1`; the remaining "hard" vectors live on the non-pivot
//! coordinates and are finished with a dense Smith normal form.

use crate::abelian::{FGAbelianGroup, Lattice};
use crate::error::{Error, Result};
use crate::intmatrix::{smith_normal_form_partial, IntMatrix};
use crate::sparse::{SparseMatrix, SparseVec};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

const NONE: u32 = u32::MAX;

fn to_i64(x: i128) -> i64 {
    i64::try_from(x).expect("coefficient overflow in reducer")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Added {
    Zero,
    Pivot,
    Hard,
}

/// Incremental echelon basis of a sublattice of `Z^dim`.
#[derive(Debug, Clone)]
pub struct Reducer {
    dim: usize,
    pivot_at: Vec<u32>,
    piv_coord: Vec<u32>,
    piv_sign: Vec<i64>,
    piv_vec: Vec<SparseVec>,
    hard: Vec<SparseVec>,
    compact_at: usize,
    scratch: Vec<i128>,
    mark: Vec<bool>,
    touched: Vec<u32>,
    queued: Vec<u32>,
    epoch: u32,
}

impl Reducer {
    pub fn new(dim: usize) -> Self {
        Reducer {
            dim,
            pivot_at: vec![NONE; dim],
            piv_coord: Vec::new(),
            piv_sign: Vec::new(),
            piv_vec: Vec::new(),
            hard: Vec::new(),
            compact_at: 256,
            scratch: vec![0; dim],
            mark: vec![false; dim],
            touched: Vec::new(),
            queued: Vec::new(),
            epoch: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pivot_count(&self) -> usize {
        self.piv_coord.len()
    }

    fn touch(&mut self, j: u32) {
        if !self.mark[j as usize] {
            self.mark[j as usize] = true;
            self.touched.push(j);
        }
    }

    /// Reduces `v` against the current pivots.
    pub fn reduce(&mut self, v: &SparseVec) -> SparseVec {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.queued.iter_mut().for_each(|q| *q = 0);
            self.epoch = 1;
        }
        let epoch = self.epoch;
        let mut heap: BinaryHeap<Reverse<u32>> = BinaryHeap::new();
        for &(i, c) in v {
            self.scratch[i as usize] += c as i128;
            self.touch(i);
            let p = self.pivot_at[i as usize];
            if p != NONE && self.queued[p as usize] != epoch {
                self.queued[p as usize] = epoch;
                heap.push(Reverse(p));
            }
        }
        while let Some(Reverse(id)) = heap.pop() {
            self.queued[id as usize] = 0;
            let coord = self.piv_coord[id as usize] as usize;
            let a = self.scratch[coord];
            if a == 0 {
                continue;
            }
            let f = a * self.piv_sign[id as usize] as i128;
            let pv = std::mem::take(&mut self.piv_vec[id as usize]);
            for &(j, c) in &pv {
                let ju = j as usize;
                self.scratch[ju] -= f * c as i128;
                self.touch(j);
                let p = self.pivot_at[ju];
                if p != NONE && p != id && self.queued[p as usize] != epoch && self.scratch[ju] != 0 {
                    debug_assert!(p > id, "echelon order violated");
                    self.queued[p as usize] = epoch;
                    heap.push(Reverse(p));
                }
            }
            self.piv_vec[id as usize] = pv;
        }
        let mut out: SparseVec = Vec::new();
        for &j in &self.touched {
            let ju = j as usize;
            let c = self.scratch[ju];
            if c != 0 {
                out.push((j, to_i64(c)));
            }
            self.scratch[ju] = 0;
            self.mark[ju] = false;
        }
        self.touched.clear();
        out.sort_unstable_by_key(|&(i, _)| i);
        out
    }

    fn push_pivot(&mut self, r: SparseVec) -> bool {
        let Some(&(coord, sign)) = r.iter().find(|&&(_, c)| c == 1 || c == -1) else {
            return false;
        };
        let id = self.piv_coord.len() as u32;
        self.pivot_at[coord as usize] = id;
        self.piv_coord.push(coord);
        self.piv_sign.push(sign);
        self.piv_vec.push(r);
        self.queued.push(0);
        true
    }

    pub fn add(&mut self, v: &SparseVec) -> Added {
        let r = self.reduce(v);
        if r.is_empty() {
            return Added::Zero;
        }
        if self.push_pivot(r.clone()) {
            return Added::Pivot;
        }
        self.hard.push(r);
        if self.hard.len() >= self.compact_at {
            self.compact();
        }
        Added::Hard
    }

    /// Replaces the hard vectors by a lattice basis, promoting unit entries to pivots.
    fn compact(&mut self) {
        loop {
            let hard = std::mem::take(&mut self.hard);
            let reduced: Vec<SparseVec> =
                hard.iter().map(|h| self.reduce(h)).filter(|h| !h.is_empty()).collect();
            let basis = lattice_basis(&reduced);
            let mut promoted = false;
            let mut rest = Vec::new();
            for b in basis {
                let b = self.reduce(&b);
                if b.is_empty() {
                    continue;
                }
                if self.push_pivot(b.clone()) {
                    promoted = true;
                } else {
                    rest.push(b);
                }
            }
            self.hard = rest;
            if !promoted {
                break;
            }
        }
        self.compact_at = (2 * self.hard.len()).max(256);
    }

    pub fn finish(mut self) -> FinishedReducer {
        self.compact();
        let support: Vec<u32> = {
            let mut s: Vec<u32> = self.hard.iter().flat_map(|h| h.iter().map(|&(i, _)| i)).collect();
            s.sort_unstable();
            s.dedup();
            s
        };
        let pos: HashMap<u32, usize> = support.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut m = IntMatrix::zeros(support.len(), self.hard.len());
        for (j, h) in self.hard.iter().enumerate() {
            for &(i, c) in h {
                m.set(pos[&i], j, BigInt::from(c));
            }
        }
        let diag = smith_normal_form_partial(&m, false, false).diagonal();
        let hard_rank = diag.iter().filter(|d| !d.is_zero()).count();
        let torsion = diag
            .iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .map(|d| d.to_u64().expect("torsion exceeds u64"))
            .collect();
        FinishedReducer {
            dim: self.dim,
            pivot_at: self.pivot_at,
            piv_coord: self.piv_coord,
            piv_sign: self.piv_sign,
            piv_vec: self.piv_vec,
            hard: self.hard,
            hard_rank,
            torsion,
        }
    }
}

/// Lattice basis of the span of sparse vectors, via Hermite normal form on their support.
fn lattice_basis(vs: &[SparseVec]) -> Vec<SparseVec> {
    if vs.is_empty() {
        return Vec::new();
    }
    let mut support: Vec<u32> = vs.iter().flat_map(|h| h.iter().map(|&(i, _)| i)).collect();
    support.sort_unstable();
    support.dedup();
    let pos: HashMap<u32, usize> = support.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut lat = Lattice::new(support.len());
    for v in vs {
        let mut d = vec![0i64; support.len()];
        for &(i, c) in v {
            d[pos[&i]] = c;
        }
        lat.insert(&d);
    }
    lat.basis()
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (support[k], c.to_i64().expect("coefficient overflow")))
                .collect()
        })
        .collect()
}

/// A completed reducer: pivots, a basis of the remaining hard part, and its invariants.
#[derive(Debug, Clone)]
pub struct FinishedReducer {
    pub dim: usize,
    pivot_at: Vec<u32>,
    piv_coord: Vec<u32>,
    piv_sign: Vec<i64>,
    piv_vec: Vec<SparseVec>,
    pub hard: Vec<SparseVec>,
    pub hard_rank: usize,
    /// Non-unit invariant factors of the lattice inside `Z^dim`.
    pub torsion: Vec<u64>,
}

impl FinishedReducer {
    pub fn rank(&self) -> usize {
        self.piv_coord.len() + self.hard_rank
    }

    pub fn is_pivot(&self, coord: usize) -> bool {
        self.pivot_at[coord] != NONE
    }

    /// Non-pivot coordinates, ascending.
    pub fn free_coords(&self) -> Vec<u32> {
        (0..self.dim as u32).filter(|&i| self.pivot_at[i as usize] == NONE).collect()
    }

    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut acc: HashMap<u32, i128> = HashMap::new();
        let mut heap: BinaryHeap<Reverse<u32>> = BinaryHeap::new();
        for &(i, c) in v {
            *acc.entry(i).or_insert(0) += c as i128;
            let p = self.pivot_at[i as usize];
            if p != NONE {
                heap.push(Reverse(p));
            }
        }
        let mut last = NONE;
        while let Some(Reverse(id)) = heap.pop() {
            if id == last {
                continue;
            }
            last = id;
            let coord = self.piv_coord[id as usize];
            let a = acc.get(&coord).copied().unwrap_or(0);
            if a == 0 {
                continue;
            }
            let f = a * self.piv_sign[id as usize] as i128;
            for &(j, c) in &self.piv_vec[id as usize] {
                let e = acc.entry(j).or_insert(0);
                *e -= f * c as i128;
                let p = self.pivot_at[j as usize];
                if p != NONE && p > id && *e != 0 {
                    heap.push(Reverse(p));
                }
            }
        }
        let mut out: SparseVec =
            acc.into_iter().filter(|&(_, c)| c != 0).map(|(i, c)| (i, to_i64(c))).collect();
        out.sort_unstable_by_key(|&(i, _)| i);
        out
    }
}

pub fn reduce_columns<'a, I: IntoIterator<Item = &'a SparseVec>>(dim: usize, cols: I) -> FinishedReducer {
    let mut r = Reducer::new(dim);
    for c in cols {
        r.add(c);
    }
    r.finish()
}

/// Chain complex `… → C_k → C_{k-1} → …` with `diffs[k - min_degree]` the map out of `C_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainComplex {
    pub min_degree: i64,
    pub dims: Vec<usize>,
    pub diffs: Vec<SparseMatrix>,
}

impl ChainComplex {
    /// Builds a complex from `d_k : C_k → C_{k-1}` for consecutive `k`; the
    /// lowest differential maps into the zero group.
    pub fn new(min_degree: i64, dims: Vec<usize>, diffs: Vec<SparseMatrix>) -> Result<Self> {
        if dims.len() != diffs.len() {
            return Err(Error::Shape("one differential per degree".into()));
        }
        for (i, d) in diffs.iter().enumerate() {
            let expect_rows = if i == 0 { d.nrows } else { dims[i - 1] };
            if d.ncols() != dims[i] || d.nrows != expect_rows {
                return Err(Error::Shape(format!("differential at index {i}")));
            }
        }
        Ok(ChainComplex { min_degree, dims, diffs })
    }

    pub fn max_degree(&self) -> i64 {
        self.min_degree + self.dims.len() as i64 - 1
    }

    pub fn dim(&self, k: i64) -> usize {
        let i = k - self.min_degree;
        if i < 0 || i as usize >= self.dims.len() {
            0
        } else {
            self.dims[i as usize]
        }
    }

    /// `d_k`, or `None` outside the stored range.
    pub fn d(&self, k: i64) -> Option<&SparseMatrix> {
        let i = k - self.min_degree;
        (i >= 0 && (i as usize) < self.diffs.len()).then(|| &self.diffs[i as usize])
    }

    /// Checks `d_{k-1} ∘ d_k = 0` for every `k`.
    pub fn check_d_squared(&self) -> Result<()> {
        for k in self.min_degree + 1..=self.max_degree() {
            let (a, b) = (self.d(k - 1).unwrap(), self.d(k).unwrap());
            let bad = b.cols.par_iter().any(|c| !a.apply(c).is_empty());
            if bad {
                return Err(Error::NotAComplex(k));
            }
        }
        Ok(())
    }
}

/// `H_k` for every stored degree, lowest first.
pub fn complex_homology(c: &ChainComplex) -> Result<Vec<FGAbelianGroup>> {
    c.check_d_squared()?;
    let n = c.dims.len();
    let finished: Vec<FinishedReducer> = (0..n)
        .into_par_iter()
        .map(|i| {
            let d = &c.diffs[i];
            reduce_columns(d.nrows, d.cols.iter())
        })
        .collect();
    Ok((0..n)
        .map(|i| {
            let rank_out = if i == 0 && c.diffs[0].nrows == 0 { 0 } else { finished[i].rank() };
            let (rank_in, torsion) = if i + 1 < n {
                (finished[i + 1].rank(), finished[i + 1].torsion.clone())
            } else {
                (0, vec![])
            };
            let mut t = torsion;
            t.sort_unstable();
            FGAbelianGroup { free_rank: c.dims[i] - rank_out - rank_in, torsion: t }
        })
        .collect())
}

/// Explicit description of `H_k = ker d_k / im d_{k+1}`: generating cycles
/// and a coordinate map from cycles to `⊕ Z/e_i ⊕ Z^f`.
#[derive(Debug, Clone)]
pub struct HomologyBasis {
    pub group: FGAbelianGroup,
    pub generators: Vec<SparseVec>,
    boundaries: FinishedReducer,
    fpos: HashMap<u32, usize>,
    nf: usize,
    krank: usize,
    v_inv: IntMatrix,
    p: IntMatrix,
    keep: Vec<(usize, u64)>,
}

impl HomologyBasis {
    /// `n`: rank of `C_k`; `boundaries`: spanning set of `im d_{k+1}`; `d_k`: outgoing map.
    pub fn new<'a, I>(n: usize, boundaries: I, d_k: &SparseMatrix) -> Self
    where
        I: IntoIterator<Item = &'a SparseVec>,
    {
        assert_eq!(d_k.ncols(), n);
        let red = reduce_columns(n, boundaries);
        let fcoords = red.free_coords();
        let nf = fcoords.len();
        let fpos: HashMap<u32, usize> = fcoords.iter().enumerate().map(|(k, &i)| (i, k)).collect();

        // rows of d_k restricted to the free coordinates
        let mut rows: Vec<SparseVec> = vec![Vec::new(); d_k.nrows];
        for (k, &f) in fcoords.iter().enumerate() {
            for &(i, c) in &d_k.cols[f as usize] {
                rows[i as usize].push((k as u32, c));
            }
        }
        let row_red = reduce_columns(nf, rows.iter().filter(|r| !r.is_empty()));
        let mut basis_rows: Vec<SparseVec> = (0..row_red.piv_vec.len()).map(|i| row_red.piv_vec[i].clone()).collect();
        basis_rows.extend(row_red.hard.iter().cloned());
        let mut b = IntMatrix::zeros(basis_rows.len(), nf);
        for (i, r) in basis_rows.iter().enumerate() {
            for &(j, c) in r {
                b.set(i, j as usize, BigInt::from(c));
            }
        }
        let sb = smith_normal_form_partial(&b, false, true);
        let rank = sb.rank;
        let kdim = nf - rank;
        let v_inv = sb.v_inv;

        // hard boundaries in kernel coordinates
        let mut y = IntMatrix::zeros(kdim, red.hard.len());
        for (j, h) in red.hard.iter().enumerate() {
            let w = mat_vec_sparse(&v_inv, h, &fpos);
            for i in 0..rank {
                assert!(w[i].is_zero(), "boundary outside the kernel");
            }
            for i in 0..kdim {
                y.set(i, j, w[rank + i].clone());
            }
        }
        let sy = smith_normal_form_partial(&y, true, false);
        let diag = sy.diagonal();
        let mut keep = Vec::new();
        let mut torsion = Vec::new();
        let mut free = Vec::new();
        for i in 0..kdim {
            let e = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
            if e.is_zero() {
                free.push(i);
            } else if !e.is_one() {
                let e = e.to_u64().expect("torsion exceeds u64");
                torsion.push((i, e));
            }
        }
        keep.extend(torsion.iter().copied());
        keep.extend(free.iter().map(|&i| (i, 0u64)));

        // generators: columns of P^{-1}, mapped through the kernel columns of V
        let p_inv = sy.u_inv;
        let v = sb.v;
        let generators = keep
            .iter()
            .map(|&(i, _)| {
                let mut out: SparseVec = Vec::new();
                for (fk, &f) in fcoords.iter().enumerate() {
                    let mut s = BigInt::zero();
                    for k in 0..kdim {
                        let pk = p_inv.get(k, i);
                        if !pk.is_zero() {
                            s += v.get(fk, rank + k) * pk;
                        }
                    }
                    if !s.is_zero() {
                        out.push((f, s.to_i64().expect("generator coefficient overflow")));
                    }
                }
                out
            })
            .collect();
        let group = FGAbelianGroup {
            free_rank: free.len(),
            torsion: torsion.iter().map(|&(_, e)| e).collect(),
        };
        HomologyBasis {
            group,
            generators,
            boundaries: red,
            fpos,
            nf,
            krank: rank,
            v_inv,
            p: sy.u,
            keep,
        }
    }

    pub fn orders(&self) -> Vec<u64> {
        self.keep.iter().map(|&(_, e)| e).collect()
    }

    /// Coordinates of the class of a cycle.
    pub fn classify(&self, z: &SparseVec) -> Vec<i64> {
        let y = self.boundaries.reduce(z);
        let w = mat_vec_sparse(&self.v_inv, &y, &self.fpos);
        for i in 0..self.krank {
            assert!(w[i].is_zero(), "argument is not a cycle");
        }
        let kdim = self.nf - self.krank;
        self.keep
            .iter()
            .map(|&(i, e)| {
                let mut s = BigInt::zero();
                for k in 0..kdim {
                    let pk = self.p.get(i, k);
                    if !pk.is_zero() {
                        s += pk * &w[self.krank + k];
                    }
                }
                if e > 0 {
                    s = s.mod_floor(&BigInt::from(e));
                }
                s.to_i64().expect("class coordinate overflow")
            })
            .collect()
    }

    /// Whether a chain lies in the span of the boundaries.
    pub fn is_boundary(&self, z: &SparseVec) -> bool {
        self.classify(z).iter().all(|&c| c == 0)
    }
}

fn mat_vec_sparse(m: &IntMatrix, v: &SparseVec, pos: &HashMap<u32, usize>) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); m.rows];
    for &(i, c) in v {
        let j = *pos.get(&i).expect("vector leaves the free coordinates");
        let c = BigInt::from(c);
        for (r, o) in out.iter_mut().enumerate() {
            let x = m.get(r, j);
            if !x.is_zero() {
                *o += x * &c;
            }
        }
    }
    out
}

/// Integer matrix of a homomorphism between finitely generated abelian groups,
/// given by the images of generators in target coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupHom {
    pub source: FGAbelianGroup,
    pub target: FGAbelianGroup,
    /// `cols[j]` = coordinates of the image of generator `j`.
    pub cols: Vec<Vec<i64>>,
}

impl GroupHom {
    pub fn identity(g: &FGAbelianGroup) -> Self {
        let n = g.ngens();
        let cols = (0..n).map(|j| (0..n).map(|i| (i == j) as i64).collect()).collect();
        GroupHom { source: g.clone(), target: g.clone(), cols }
    }

    pub fn zero(source: &FGAbelianGroup, target: &FGAbelianGroup) -> Self {
        GroupHom {
            source: source.clone(),
            target: target.clone(),
            cols: vec![vec![0; target.ngens()]; source.ngens()],
        }
    }

    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        let orders = self.target.coordinate_orders();
        let mut out = vec![0i128; orders.len()];
        for (j, &c) in x.iter().enumerate() {
            if c != 0 {
                for (o, &v) in out.iter_mut().zip(&self.cols[j]) {
                    *o += c as i128 * v as i128;
                }
            }
        }
        out.iter()
            .zip(&orders)
            .map(|(&v, &o)| if o > 0 { v.rem_euclid(o as i128) as i64 } else { to_i64(v) })
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GroupHom) -> GroupHom {
        assert_eq!(other.target, self.source);
        GroupHom {
            source: other.source.clone(),
            target: self.target.clone(),
            cols: other.cols.iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn sub(&self, other: &GroupHom) -> GroupHom {
        let neg: Vec<Vec<i64>> = other.cols.iter().map(|c| c.iter().map(|x| -x).collect()).collect();
        let orders = self.target.coordinate_orders();
        let cols = self
            .cols
            .iter()
            .zip(&neg)
            .map(|(a, b)| {
                let mut v: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                crate::abelian::normalize(&orders, &mut v);
                v
            })
            .collect();
        GroupHom { source: self.source.clone(), target: self.target.clone(), cols }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.iter().all(|&x| x == 0))
    }

    /// Image as a subgroup, described by generators in target coordinates.
    pub fn image_structure(&self) -> FGAbelianGroup {
        crate::abelian::subgroup_structure(&self.target.coordinate_orders(), &self.cols)
    }
}

/// Torsion-free helper: the sign of a `BigInt` as used in reports.
pub fn bigint_sign(x: &BigInt) -> i64 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn times_two() -> ChainComplex {
        // 0 → Z --2--> Z → 0 in degrees 1, 0
        let d0 = SparseMatrix::zero(0, 1);
        let d1 = SparseMatrix::from_dense(&[vec![2]]);
        ChainComplex::new(0, vec![1, 1], vec![d0, d1]).unwrap()
    }

    #[test]
    fn multiplication_by_two() {
        let h = complex_homology(&times_two()).unwrap();
        assert_eq!(h[0].torsion, vec![2]);
        assert!(h[1].is_trivial());
    }

    #[test]
    fn zero_differentials() {
        let c = ChainComplex::new(
            0,
            vec![2, 3],
            vec![SparseMatrix::zero(0, 2), SparseMatrix::zero(2, 3)],
        )
        .unwrap();
        let h = complex_homology(&c).unwrap();
        assert_eq!(h[0], FGAbelianGroup::free(2));
        assert_eq!(h[1], FGAbelianGroup::free(3));
    }

    #[test]
    fn not_a_complex() {
        let d0 = SparseMatrix::zero(0, 1);
        let d1 = SparseMatrix::from_dense(&[vec![1]]);
        let d2 = SparseMatrix::from_dense(&[vec![1]]);
        let c = ChainComplex::new(0, vec![1, 1, 1], vec![d0, d1, d2]).unwrap();
        assert_eq!(complex_homology(&c), Err(Error::NotAComplex(2)));
    }

    #[test]
    fn basis_classifies() {
        // C_1 = Z^2 --[2 4]--> ... boundary of a 2-chain: (2, 4); d_1 = 0
        let d1 = SparseMatrix::zero(0, 2);
        let b = vec![vec![(0u32, 2i64), (1, 4)]];
        let hb = HomologyBasis::new(2, b.iter(), &d1);
        assert_eq!(hb.group, FGAbelianGroup { free_rank: 1, torsion: vec![2] });
        assert!(hb.is_boundary(&vec![(0, 2), (1, 4)]));
        assert!(!hb.is_boundary(&vec![(0, 1), (1, 2)]));
        for (k, g) in hb.generators.iter().enumerate() {
            let c = hb.classify(g);
            for (i, &x) in c.iter().enumerate() {
                assert_eq!(x, (i == k) as i64);
            }
        }
    }

    #[test]
    fn reducer_rank() {
        let mut r = Reducer::new(3);
        assert_eq!(r.add(&vec![(0, 1), (1, 1)]), Added::Pivot);
        assert_eq!(r.add(&vec![(1, 2), (2, 2)]), Added::Hard);
        assert_eq!(r.add(&vec![(0, 2), (1, 2)]), Added::Zero);
        let f = r.finish();
        assert_eq!(f.rank(), 2);
        assert_eq!(f.torsion, vec![2]);
    }
}
