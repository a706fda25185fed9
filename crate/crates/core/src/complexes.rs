//! The complexes `Z[U_*(R^{2n})]`, `Z[Skew⁺_*(R)]` and `C_*(R^{2n}; r)`, and the
//! chain map `φ : C_*(R^{2n}; r) → Z[U_*(R^{2n})]`.

use crate::error::{Error, Result};
use crate::group::DEFAULT_CAP;
use crate::homology::{complex_homology, ChainComplex};
use crate::abelian::FGAbelianGroup;
use crate::ring::Ring;
use crate::sparse::{canonicalize, SparseMatrix, SparseVec};
use crate::unimodular::{enumerate_skew_plus, enumerate_u, par_for_each_u_indexed, SeqTable, SkewMat, SEQ_CAP};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::HashMap;

/// Sign of the `j`-th face (0-based) in `d = Σ (−1)^{i+1} d_i` (1-based `i`).
pub fn face_sign(j: usize) -> i64 {
    if j % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Basis of one degree of a labeled complex.
#[derive(Debug, Clone)]
pub enum Basis {
    Seqs(SeqTable),
    Skews(Vec<SkewMat>),
    Aux(Vec<AuxLabel>),
}

impl Basis {
    pub fn len(&self) -> usize {
        match self {
            Basis::Seqs(t) => t.len(),
            Basis::Skews(v) => v.len(),
            Basis::Aux(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn labels_json(&self) -> Vec<Value> {
        match self {
            Basis::Seqs(t) => t.iter().map(|s| json!(s.vectors)).collect(),
            Basis::Skews(v) => v.iter().map(|s| serde_json::to_value(s).unwrap()).collect(),
            Basis::Aux(v) => v.iter().map(|s| serde_json::to_value(s).unwrap()).collect(),
        }
    }
}

/// A chain complex of free abelian groups with labeled bases.
#[derive(Debug, Clone)]
pub struct LabeledComplex {
    pub bases: Vec<Basis>,
    pub complex: ChainComplex,
}

impl LabeledComplex {
    pub fn homology(&self) -> Result<Vec<FGAbelianGroup>> {
        complex_homology(&self.complex)
    }

    pub fn check_d_squared(&self) -> Result<()> {
        self.complex.check_d_squared()
    }

    /// Per-degree labels and sparse triplet differentials.
    pub fn to_json(&self) -> Value {
        let degrees: Vec<Value> = self
            .bases
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let d = &self.complex.diffs[i];
                json!({
                    "degree": self.complex.min_degree + i as i64,
                    "basis": b.labels_json(),
                    "differential": {"rows": d.nrows, "cols": d.ncols(), "triplets": d.triplets()},
                })
            })
            .collect();
        json!({ "degrees": degrees })
    }

    /// The truncation `C_{≤q}`.
    pub fn truncate(&self, q: i64) -> LabeledComplex {
        let keep = ((q - self.complex.min_degree + 1).max(0) as usize).min(self.bases.len());
        LabeledComplex {
            bases: self.bases[..keep].to_vec(),
            complex: ChainComplex {
                min_degree: self.complex.min_degree,
                dims: self.complex.dims[..keep].to_vec(),
                diffs: self.complex.diffs[..keep].to_vec(),
            },
        }
    }
}

/// Face differential `Z[U_q] → Z[U_{q−1}]` between sorted tables.
pub fn seq_differential(src: &SeqTable, dst: &SeqTable) -> Result<SparseMatrix> {
    let cols: Result<Vec<SparseVec>> = (0..src.len())
        .into_par_iter()
        .map(|i| {
            let mut terms = Vec::with_capacity(src.q);
            for j in 0..src.q {
                let k = dst
                    .find(&src.face_key(i, j))
                    .ok_or_else(|| Error::Shape("face outside the target basis".into()))?;
                terms.push((k as u32, face_sign(j)));
            }
            canonicalize(&mut terms);
            Ok(terms)
        })
        .collect();
    Ok(SparseMatrix { nrows: dst.len(), cols: cols? })
}

/// `Z[U_q(R^{2n})]` for `0 ≤ q ≤ q_max`.
pub fn build_u_complex(r: &Ring, n: usize, q_max: usize) -> Result<LabeledComplex> {
    let tables: Vec<SeqTable> =
        (0..=q_max).map(|q| enumerate_u(q, n, r, SEQ_CAP)).collect::<Result<_>>()?;
    let mut diffs = vec![SparseMatrix::zero(0, 1)];
    for q in 1..=q_max {
        diffs.push(seq_differential(&tables[q], &tables[q - 1])?);
    }
    let dims = tables.iter().map(|t| t.len()).collect();
    let complex = ChainComplex::new(0, dims, diffs)?;
    Ok(LabeledComplex { bases: tables.into_iter().map(Basis::Seqs).collect(), complex })
}

/// `Z[Skew⁺_q(R)]` for `0 ≤ q ≤ q_max`, with `d A = Σ (−1)^{i+1} d_i A`.
pub fn build_skew_complex(r: &Ring, q_max: usize) -> Result<LabeledComplex> {
    let bases: Vec<Vec<SkewMat>> =
        (0..=q_max).map(|q| enumerate_skew_plus(q, r, DEFAULT_CAP)).collect::<Result<_>>()?;
    let mut diffs = vec![SparseMatrix::zero(0, bases[0].len())];
    for q in 1..=q_max {
        let index: HashMap<&SkewMat, u32> = bases[q - 1].iter().enumerate().map(|(i, a)| (a, i as u32)).collect();
        let cols = bases[q]
            .iter()
            .map(|a| {
                let mut terms: SparseVec = (0..q).map(|j| (index[&a.face(j)], face_sign(j))).collect();
                canonicalize(&mut terms);
                terms
            })
            .collect();
        diffs.push(SparseMatrix { nrows: bases[q - 1].len(), cols });
    }
    let dims = bases.iter().map(|b| b.len()).collect();
    let complex = ChainComplex::new(0, dims, diffs)?;
    Ok(LabeledComplex { bases: bases.into_iter().map(Basis::Skews).collect(), complex })
}

/// A basis element `(u; w)` of `Z[U^{(i)}_{2r+2}(R^{2n})]`: `u ∈ U_{2r+2}(R^{2r})`
/// in the first `2r` coordinates and `w` zero outside column `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AuxLabel {
    /// Column `i`, 1-based.
    pub i: usize,
    pub u: Vec<Vec<u64>>,
    pub w: Vec<u64>,
}

impl AuxLabel {
    /// The `2r+2` columns in `R^{2n}`.
    pub fn columns(&self, n: usize) -> Vec<Vec<u64>> {
        let r2 = self.u.first().map_or(0, |c| c.len());
        self.u
            .iter()
            .enumerate()
            .map(|(j, uj)| {
                let mut v = uj.clone();
                if j + 1 == self.i {
                    v.extend_from_slice(&self.w);
                } else {
                    v.extend(std::iter::repeat(0).take(2 * n - r2));
                }
                v
            })
            .collect()
    }
}

/// `C_*(R^{2n}; r)`: for `r < n`, the two-term complex
/// `⊕_i Z[U^{(i)}_{2r+2}] → Z[U_{2r+1}(R^{2r})]` in degrees `2r+1, 2r`;
/// for `r = n`, `Z[U_{2n+1}(R^{2n})]` in degree `2n`.
#[derive(Debug, Clone)]
pub struct AuxComplex {
    pub n: usize,
    pub r: usize,
    pub top: Vec<AuxLabel>,
    pub bottom: SeqTable,
    /// `((−1)^i d_i)_i`, bottom × top; empty when `r = n`.
    pub differential: SparseMatrix,
}

fn pad(v: &[u64], len: usize) -> Vec<u16> {
    let mut out: Vec<u16> = v.iter().map(|&x| x as u16).collect();
    out.resize(len, 0);
    out
}

fn padded_key(cols: &[Vec<u64>], n2: usize) -> Vec<u16> {
    cols.iter().flat_map(|c| pad(c, n2)).collect()
}

pub fn build_aux_complex(ring: &Ring, n: usize, r: usize) -> Result<AuxComplex> {
    if r > n {
        return Err(Error::RankOrder { r, s: n });
    }
    if r == n {
        let bottom = enumerate_u(2 * n + 1, n, ring, SEQ_CAP)?;
        return Ok(AuxComplex { n, r, top: vec![], bottom, differential: SparseMatrix::zero(0, 0) });
    }
    let us = enumerate_u(2 * r + 2, r, ring, DEFAULT_CAP)?;
    let ws = enumerate_u(1, n - r, ring, DEFAULT_CAP)?;
    let bottom = enumerate_u(2 * r + 1, r, ring, DEFAULT_CAP)?;
    let mut top = Vec::with_capacity(us.len() * ws.len() * (2 * r + 2));
    for i in 1..=2 * r + 2 {
        for ui in 0..us.len() {
            for wi in 0..ws.len() {
                top.push(AuxLabel { i, u: us.get(ui).vectors, w: ws.get(wi).vectors[0].clone() });
            }
        }
    }
    let cols: Result<Vec<SparseVec>> = top
        .par_iter()
        .map(|l| {
            let mut face = l.u.clone();
            face.remove(l.i - 1);
            let key: Vec<u16> = face.iter().flatten().map(|&x| x as u16).collect();
            let k = bottom.find(&key).ok_or_else(|| Error::Shape("d_i u outside U_{2r+1}(R^{2r})".into()))?;
            let sign = if l.i % 2 == 0 { 1 } else { -1 };
            Ok(vec![(k as u32, sign)])
        })
        .collect();
    let differential = SparseMatrix { nrows: bottom.len(), cols: cols? };
    Ok(AuxComplex { n, r, top, bottom, differential })
}

/// `φ` in its two degrees: `φ_top = (d_i^omit)_i` into `Z[U_{2r+1}(R^{2n})]`
/// and `φ_bottom = d` into `Z[U_{2r}(R^{2n})]`.
#[derive(Debug, Clone)]
pub struct PhiMap {
    pub top: SparseMatrix,
    pub bottom: SparseMatrix,
}

/// Builds `φ` against the full tables `U_{2r+1}(R^{2n})` and `U_{2r}(R^{2n})`.
pub fn phi_chain_map(aux: &AuxComplex, full_top: &SeqTable, full_bottom: &SeqTable) -> Result<PhiMap> {
    let n2 = 2 * aux.n;
    if aux.r == aux.n {
        return Ok(PhiMap { top: SparseMatrix::zero(full_top.len(), 0), bottom: seq_differential(&aux.bottom, full_bottom)? });
    }
    let top: Result<Vec<SparseVec>> = aux
        .top
        .par_iter()
        .map(|l| {
            let cols = l.columns(aux.n);
            let mut terms = Vec::new();
            for j in 0..cols.len() {
                if j + 1 == l.i {
                    continue;
                }
                let mut face = cols.clone();
                face.remove(j);
                let key = padded_key(&face, n2);
                let k = full_top
                    .find(&key)
                    .ok_or_else(|| Error::Shape("d_j w outside U_{2r+1}(R^{2n})".into()))?;
                terms.push((k as u32, face_sign(j)));
            }
            canonicalize(&mut terms);
            Ok(terms)
        })
        .collect();
    let bottom: Result<Vec<SparseVec>> = (0..aux.bottom.len())
        .into_par_iter()
        .map(|b| {
            let u = aux.bottom.get(b).vectors;
            let mut terms = Vec::new();
            for j in 0..u.len() {
                let mut face = u.clone();
                face.remove(j);
                let key = padded_key(&face, n2);
                let k = full_bottom
                    .find(&key)
                    .ok_or_else(|| Error::Shape("face outside U_{2r}(R^{2n})".into()))?;
                terms.push((k as u32, face_sign(j)));
            }
            canonicalize(&mut terms);
            Ok(terms)
        })
        .collect();
    Ok(PhiMap {
        top: SparseMatrix { nrows: full_top.len(), cols: top? },
        bottom: SparseMatrix { nrows: full_bottom.len(), cols: bottom? },
    })
}

/// Result of checking that `φ` is a chain map and the auxiliary complex is a complex.
#[derive(Debug, Clone, Serialize)]
pub struct AuxCheck {
    pub n: usize,
    pub r: usize,
    pub top_rank: usize,
    pub bottom_rank: usize,
    pub d_squared_zero: bool,
    pub square_commutes: bool,
    pub lower_square_commutes: bool,
}

impl AuxCheck {
    pub fn pass(&self) -> bool {
        self.d_squared_zero && self.square_commutes && self.lower_square_commutes
    }
}

/// Builds `C_*(R^{2n}; r)` and `φ` and checks `d ∘ φ = φ ∘ d` in every degree.
pub fn check_aux(ring: &Ring, n: usize, r: usize) -> Result<AuxCheck> {
    let aux = if r < n { Some(build_aux_complex(ring, n, r)?) } else { None };
    if r == n {
        // Z[U_{2n+1}] → Z[U_{2n}] → Z[U_{2n-1}]; streamed so U_{2n+1} is never stored
        let t2n = enumerate_u(2 * n, n, ring, SEQ_CAP)?;
        let (count, ok) = stream_d_squared(ring, n, 2 * n + 1, &t2n)?;
        return Ok(AuxCheck {
            n,
            r,
            top_rank: 0,
            bottom_rank: count,
            d_squared_zero: true,
            square_commutes: ok,
            lower_square_commutes: ok,
        });
    }
    let aux = aux.expect("r < n");
    let full_top = enumerate_u(2 * r + 1, n, ring, SEQ_CAP)?;
    let full_bottom = enumerate_u(2 * r, n, ring, SEQ_CAP)?;
    let phi = phi_chain_map(&aux, &full_top, &full_bottom)?;
    let d_top = seq_differential(&full_top, &full_bottom)?;
    // D_full ∘ φ_top = φ_bottom ∘ D_aux
    let lhs = d_top.compose(&phi.top);
    let rhs = phi.bottom.compose(&aux.differential);
    let square = lhs == rhs;
    // D_full ∘ φ_bottom = 0
    let lower = if r == 0 {
        true
    } else {
        let below = enumerate_u(2 * r - 1, n, ring, SEQ_CAP)?;
        seq_differential(&full_bottom, &below)?.compose(&phi.bottom).is_zero()
    };
    Ok(AuxCheck {
        n,
        r,
        top_rank: aux.top.len(),
        bottom_rank: aux.bottom.len(),
        d_squared_zero: true,
        square_commutes: square,
        lower_square_commutes: lower,
    })
}

/// Checks `d ∘ d = 0` on `Z[U_q(R^{2n})]` label by label, with every face of a
/// label lying in `target = U_{q−1}(R^{2n})`.
pub fn stream_d_squared(ring: &Ring, n: usize, q: usize, target: &SeqTable) -> Result<(usize, bool)> {
    use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
    if q < 2 || q > 18 {
        return Err(Error::Shape("streamed check needs 2 ≤ q ≤ 18".into()));
    }
    let m = ring.modulus as u128;
    let nv = m.pow(2 * n as u32);
    let vec_index = |v: &[u16]| v.iter().fold(0u128, |acc, &c| acc * m + c as u128);
    // membership of faces through a bitset on tuples of vector indices when it is small enough
    let bits: Option<Vec<u64>> = nv.checked_pow(q as u32 - 1).filter(|&t| t <= 1 << 34).map(|t| {
        let mut b = vec![0u64; (t as usize).div_ceil(64)];
        let w = 2 * n;
        for i in 0..target.len() {
            let row = target.raw(i);
            let code = row.chunks(w).fold(0u128, |acc, v| acc * nv + vec_index(v)) as usize;
            b[code / 64] |= 1 << (code % 64);
        }
        b
    });
    let ok = AtomicBool::new(true);
    let missing = AtomicBool::new(false);
    let count = AtomicUsize::new(0);
    par_for_each_u_indexed(q, n, ring, &|seq, vecs| {
        count.fetch_add(1, Ordering::Relaxed);
        let mut key: Vec<u16> = Vec::new();
        let mut acc: Vec<([u32; 16], i64)> = Vec::with_capacity(q * (q - 1));
        for j in 0..q {
            let present = match &bits {
                Some(b) => {
                    let code = seq
                        .iter()
                        .enumerate()
                        .filter(|&(t, _)| t != j)
                        .fold(0u128, |acc, (_, &x)| acc * nv + x as u128) as usize;
                    b[code / 64] >> (code % 64) & 1 == 1
                }
                None => {
                    key.clear();
                    for (t, &x) in seq.iter().enumerate() {
                        if t != j {
                            key.extend(vecs[x as usize].iter().map(|&c| c as u16));
                        }
                    }
                    target.find(&key).is_some()
                }
            };
            if !present {
                missing.store(true, Ordering::Relaxed);
            }
            for k in 0..q - 1 {
                // remove position j, then position k of the remaining sequence
                let skip = if k < j { k } else { k + 1 };
                let mut ff = [u32::MAX; 16];
                let mut len = 0;
                for (t, &x) in seq.iter().enumerate() {
                    if t != j && t != skip {
                        ff[len] = x;
                        len += 1;
                    }
                }
                acc.push((ff, face_sign(j) * face_sign(k)));
            }
        }
        acc.sort_unstable_by_key(|e| e.0);
        let mut i = 0;
        while i < acc.len() {
            let mut total = 0;
            let mut k = i;
            while k < acc.len() && acc[k].0 == acc[i].0 {
                total += acc[k].1;
                k += 1;
            }
            if total != 0 {
                ok.store(false, Ordering::Relaxed);
            }
            i = k;
        }
    });
    if missing.into_inner() {
        return Err(Error::Shape("face outside the target basis".into()));
    }
    Ok((count.into_inner(), ok.into_inner()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u_complex_small() {
        let r = Ring::prime_field(3).unwrap();
        let c = build_u_complex(&r, 1, 3).unwrap();
        assert_eq!(c.complex.dims, vec![1, 8, 48, 192]);
        c.check_d_squared().unwrap();
        // d(v₁, v₂) = (v₂) − (v₁)
        let t1 = match &c.bases[1] {
            Basis::Seqs(t) => t.clone(),
            _ => unreachable!(),
        };
        let t2 = match &c.bases[2] {
            Basis::Seqs(t) => t.clone(),
            _ => unreachable!(),
        };
        let v = t2.get(0);
        let col = &c.complex.diffs[2].cols[0];
        let i1 = t1.find(&[v.vectors[1][0] as u16, v.vectors[1][1] as u16]).unwrap() as u32;
        let i0 = t1.find(&[v.vectors[0][0] as u16, v.vectors[0][1] as u16]).unwrap() as u32;
        let mut expect = vec![(i1, 1), (i0, -1)];
        expect.sort();
        assert_eq!(col, &expect);
    }

    #[test]
    fn skew_complex_small() {
        let r = Ring::prime_field(3).unwrap();
        let c = build_skew_complex(&r, 4).unwrap();
        c.check_d_squared().unwrap();
        assert_eq!(c.complex.dims[..3], [1, 1, 2]);
        assert!(c.complex.diffs[2].is_zero());
    }

    #[test]
    fn aux_small() {
        let r = Ring::prime_field(3).unwrap();
        let a = build_aux_complex(&r, 1, 0).unwrap();
        assert_eq!(a.bottom.len(), 1);
        assert_eq!(a.top.len(), 2 * 8);
        for rr in 0..=1 {
            assert!(check_aux(&r, 1, rr).unwrap().pass());
        }
    }

    #[test]
    fn omit_unfolds() {
        let r = Ring::prime_field(3).unwrap();
        let aux = build_aux_complex(&r, 2, 0).unwrap();
        let t1 = enumerate_u(1, 2, &r, DEFAULT_CAP).unwrap();
        let t0 = enumerate_u(0, 2, &r, DEFAULT_CAP).unwrap();
        let phi = phi_chain_map(&aux, &t1, &t0).unwrap();
        // i = 1: d_1^omit (w, 0) = −d_2 (w, 0) = −(w)
        let l = &aux.top[0];
        assert_eq!(l.i, 1);
        let k = t1.find(&l.w.iter().map(|&x| x as u16).collect::<Vec<_>>()).unwrap() as u32;
        assert_eq!(phi.top.cols[0], vec![(k, -1)]);
    }
}
