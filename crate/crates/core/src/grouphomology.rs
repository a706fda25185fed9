//! Integral homology of finite groups with coefficients in signed permutation
//! modules, via the normalized bar complex, and maps induced by compatible pairs.

use crate::abelian::FGAbelianGroup;
use crate::error::{Error, Result};
use crate::group::FinGroup;
use crate::homology::{ChainComplex, GroupHom, HomologyBasis};
use crate::ring::Ring;
use crate::sparse::{canonicalize, SparseMatrix, SparseVec};
use crate::unimodular::{key_of, SeqTable, UnimodSeq};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

/// Largest bar-complex rank built before giving up.
pub const BAR_CAP: usize = 40_000_000;

/// Multiplication and inversion on `0..order`, with `0` the identity.
pub trait GroupOps: Sync {
    fn order(&self) -> usize;
    fn mul(&self, a: u32, b: u32) -> u32;
    fn inv(&self, a: u32) -> u32;
}

impl GroupOps for FinGroup {
    fn order(&self) -> usize {
        FinGroup::order(self)
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        FinGroup::mul(self, a, b)
    }
    fn inv(&self, a: u32) -> u32 {
        FinGroup::inv(self, a)
    }
}

/// A finite group given by its multiplication table.
#[derive(Debug, Clone)]
pub struct TableGroup {
    n: usize,
    table: Vec<u32>,
    inverse: Vec<u32>,
}

impl GroupOps for TableGroup {
    fn order(&self) -> usize {
        self.n
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.n + b as usize]
    }
    fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }
}

impl TableGroup {
    pub fn from_table(n: usize, table: Vec<u32>) -> Result<Self> {
        if table.len() != n * n || (0..n).any(|a| table[a] != a as u32 || table[a * n] != a as u32) {
            return Err(Error::Shape("table without identity at 0".into()));
        }
        let inverse = (0..n)
            .map(|a| (0..n as u32).find(|&b| table[a * n + b as usize] == 0).ok_or_else(|| Error::Shape("no inverse".into())))
            .collect::<Result<_>>()?;
        Ok(TableGroup { n, table, inverse })
    }

    /// The subgroup `elems` of `g` (which must contain the identity first);
    /// returns the group and the inclusion as element indices of `g`.
    pub fn subgroup<G: GroupOps>(g: &G, elems: &[u32]) -> Result<(Self, Vec<u32>)> {
        if elems.first() != Some(&0) {
            return Err(Error::Shape("subgroup must list the identity first".into()));
        }
        let pos: HashMap<u32, u32> = elems.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
        let n = elems.len();
        let mut table = Vec::with_capacity(n * n);
        for &a in elems {
            for &b in elems {
                table.push(*pos.get(&g.mul(a, b)).ok_or_else(|| Error::Shape("not closed".into()))?);
            }
        }
        Ok((TableGroup::from_table(n, table)?, elems.to_vec()))
    }

    /// `g / normal` and the projection.
    pub fn quotient<G: GroupOps>(g: &G, normal: &[u32]) -> Result<(Self, Vec<u32>)> {
        let mut coset = vec![u32::MAX; g.order()];
        let mut reps = Vec::new();
        for x in 0..g.order() as u32 {
            if coset[x as usize] != u32::MAX {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(x);
            for &h in normal {
                coset[g.mul(x, h) as usize] = id;
            }
        }
        let n = reps.len();
        let mut table = Vec::with_capacity(n * n);
        for &a in &reps {
            for &b in &reps {
                table.push(coset[g.mul(a, b) as usize]);
            }
        }
        Ok((TableGroup::from_table(n, table)?, coset))
    }
}

/// Subgroup generated by `gens`, by closure.
pub fn generated_subgroup<G: GroupOps>(g: &G, gens: &[u32]) -> Vec<u32> {
    let mut seen = vec![false; g.order()];
    seen[0] = true;
    let mut out = vec![0u32];
    let mut i = 0;
    while i < out.len() {
        let x = out[i];
        for &s in gens {
            let y = g.mul(x, s);
            if !seen[y as usize] {
                seen[y as usize] = true;
                out.push(y);
            }
        }
        i += 1;
    }
    out
}

/// `[G, G]` as the normal closure of the commutators of `gens`.
pub fn derived_subgroup<G: GroupOps>(g: &G, gens: &[u32]) -> Vec<u32> {
    let comm = |a: u32, b: u32| g.mul(g.mul(a, b), g.mul(g.inv(a), g.inv(b)));
    let mut sgens: Vec<u32> = Vec::new();
    for &a in gens {
        for &b in gens {
            let c = comm(a, b);
            if c != 0 {
                sgens.push(c);
            }
        }
    }
    loop {
        let h = generated_subgroup(g, &sgens);
        let mut member = vec![false; g.order()];
        for &x in &h {
            member[x as usize] = true;
        }
        let extra: Vec<u32> = sgens
            .iter()
            .flat_map(|&s| gens.iter().map(move |&x| (s, x)))
            .map(|(s, x)| g.mul(g.mul(x, s), g.inv(x)))
            .filter(|&c| !member[c as usize])
            .collect();
        if extra.is_empty() {
            let mut h = h;
            h.sort_unstable();
            return h;
        }
        sgens.extend(extra);
    }
}

/// A free abelian group `Z^rank` on which every group element acts by a signed permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GModule {
    pub rank: usize,
    /// `action[g][j] = (k, s)`: `g · e_j = s · e_k`.
    pub action: Vec<Vec<(u32, i8)>>,
}

impl GModule {
    pub fn trivial<G: GroupOps>(g: &G) -> Self {
        GModule { rank: 1, action: vec![vec![(0, 1)]; g.order()] }
    }

    pub fn from_fn<G: GroupOps>(g: &G, rank: usize, f: impl Fn(u32, u32) -> (u32, i8) + Sync) -> Self {
        let action = (0..g.order() as u32).into_par_iter().map(|x| (0..rank as u32).map(|j| f(x, j)).collect()).collect();
        GModule { rank, action }
    }

    /// `Z[G/H]` with cosets `gH` numbered in order of first appearance.
    pub fn cosets<G: GroupOps>(g: &G, h: &[u32]) -> Self {
        let mut coset = vec![u32::MAX; g.order()];
        let mut reps = Vec::new();
        for x in 0..g.order() as u32 {
            if coset[x as usize] == u32::MAX {
                for &y in h {
                    coset[g.mul(x, y) as usize] = reps.len() as u32;
                }
                reps.push(x);
            }
        }
        GModule::from_fn(g, reps.len(), |x, j| (coset[g.mul(x, reps[j as usize]) as usize], 1))
    }

    /// `Z[U_q(R^{2n})]` for a matrix group acting on `R^{2n}`.
    pub fn sequences(g: &FinGroup, table: &SeqTable, r: &Ring) -> Result<Self> {
        if g.dim != 2 * table.n {
            return Err(Error::Shape("group does not act on the sequence space".into()));
        }
        let mats: Vec<_> = (0..g.order() as u32).map(|x| g.matrix(x)).collect();
        let missing = std::sync::atomic::AtomicBool::new(false);
        let m = GModule::from_fn(g, table.len(), |x, j| {
            let img = table.get(j as usize).act(&mats[x as usize], r);
            match table.find(&key_of(&img)) {
                Some(k) => (k as u32, 1),
                None => {
                    missing.store(true, std::sync::atomic::Ordering::Relaxed);
                    (0, 1)
                }
            }
        });
        if missing.into_inner() {
            return Err(Error::Shape("action leaves the sequence table".into()));
        }
        Ok(m)
    }

    /// Checks `(gh)·e_j = g·(h·e_j)` for all pairs in `pairs`.
    pub fn check_action<G: GroupOps>(&self, g: &G, pairs: &[(u32, u32)]) -> bool {
        pairs.iter().all(|&(a, b)| {
            let ab = g.mul(a, b);
            (0..self.rank).all(|j| {
                let (k, s) = self.action[b as usize][j];
                let (l, t) = self.action[a as usize][k as usize];
                self.action[ab as usize][j] == (l, s * t)
            })
        })
    }
}

/// Index of `m ⊗ [g₁|…|g_k]` with all `g_i ≠ 1`.
fn encode(m: u32, tuple: &[u32], rank: usize, base: usize) -> u32 {
    let mut idx = 0usize;
    for &g in tuple.iter().rev() {
        idx = idx * base + (g as usize - 1);
    }
    (idx * rank + m as usize) as u32
}

fn decode(idx: usize, k: usize, rank: usize, base: usize) -> (u32, Vec<u32>) {
    let m = (idx % rank) as u32;
    let mut rest = idx / rank;
    let mut tuple = Vec::with_capacity(k);
    for _ in 0..k {
        tuple.push((rest % base) as u32 + 1);
        rest /= base;
    }
    (m, tuple)
}

/// `∂(m ⊗ [g₁|…|g_k]) = g₁⁻¹m ⊗ [g₂|…] + Σ (−1)^i m ⊗ […|g_i g_{i+1}|…] + (−1)^k m ⊗ […|g_{k−1}]`,
/// with degenerate terms dropped.
fn bar_boundary<G: GroupOps>(g: &G, m: &GModule, k: usize, idx: usize) -> SparseVec {
    let base = g.order() - 1;
    let (mi, t) = decode(idx, k, m.rank, base);
    let mut out: SparseVec = Vec::with_capacity(k + 1);
    let (m1, s1) = m.action[g.inv(t[0]) as usize][mi as usize];
    out.push((encode(m1, &t[1..], m.rank, base), s1 as i64));
    let mut buf = Vec::with_capacity(k);
    for i in 0..k - 1 {
        let prod = g.mul(t[i], t[i + 1]);
        if prod == 0 {
            continue;
        }
        buf.clear();
        buf.extend_from_slice(&t[..i]);
        buf.push(prod);
        buf.extend_from_slice(&t[i + 2..]);
        out.push((encode(mi, &buf, m.rank, base), if (i + 1) % 2 == 0 { 1 } else { -1 }));
    }
    out.push((encode(mi, &t[..k - 1], m.rank, base), if k % 2 == 0 { 1 } else { -1 }));
    canonicalize(&mut out);
    out
}

/// The normalized bar complex `M ⊗_G B_*` in degrees `0..=top`.
pub fn bar_complex<G: GroupOps>(g: &G, m: &GModule, top: usize) -> Result<ChainComplex> {
    let base = g.order() - 1;
    let mut dims = Vec::with_capacity(top + 1);
    for k in 0..=top {
        let d = (base as u128).pow(k as u32) * m.rank as u128;
        if d > BAR_CAP as u128 {
            return Err(Error::CapExceeded(BAR_CAP));
        }
        dims.push(d as usize);
    }
    let mut diffs = vec![SparseMatrix::zero(0, dims[0])];
    for k in 1..=top {
        let cols = (0..dims[k]).into_par_iter().map(|idx| bar_boundary(g, m, k, idx)).collect();
        diffs.push(SparseMatrix { nrows: dims[k - 1], cols });
    }
    ChainComplex::new(0, dims, diffs)
}

/// `H_0, …, H_{p_max}` of `G` with coefficients in `M`, with explicit bases.
#[derive(Debug, Clone)]
pub struct GroupHomology {
    pub order: usize,
    pub rank: usize,
    pub p_max: usize,
    pub complex: ChainComplex,
    pub bases: Vec<HomologyBasis>,
}

impl GroupHomology {
    pub fn groups(&self) -> Vec<FGAbelianGroup> {
        self.bases.iter().map(|b| b.group.clone()).collect()
    }

    pub fn group(&self, p: usize) -> &FGAbelianGroup {
        &self.bases[p].group
    }
}

pub fn bar_homology<G: GroupOps>(g: &G, m: &GModule, p_max: usize) -> Result<GroupHomology> {
    let complex = bar_complex(g, m, p_max + 1)?;
    let bases = (0..=p_max)
        .into_par_iter()
        .map(|p| HomologyBasis::new(complex.dims[p], complex.diffs[p + 1].cols.iter(), &complex.diffs[p]))
        .collect();
    Ok(GroupHomology { order: g.order(), rank: m.rank, p_max, complex, bases })
}

/// Coefficient map `e_j ↦ f(j)` between modules.
pub type CoeffMap<'a> = &'a (dyn Fn(u32) -> SparseVec + Sync);

/// Checks `f(g·m) = φ(g)·f(m)` on every element and basis vector.
pub fn check_compatible(src: &GModule, tgt: &GModule, phi: &[u32], f: CoeffMap) -> Result<()> {
    let apply = |g: u32, v: &SparseVec| -> SparseVec {
        let mut out: SparseVec = v
            .iter()
            .map(|&(k, c)| {
                let (l, s) = tgt.action[g as usize][k as usize];
                (l, c * s as i64)
            })
            .collect();
        canonicalize(&mut out);
        out
    };
    let ok = (0..phi.len()).into_par_iter().all(|x| {
        (0..src.rank as u32).all(|j| {
            let (k, s) = src.action[x][j as usize];
            let mut lhs: SparseVec = f(k).into_iter().map(|(i, c)| (i, c * s as i64)).collect();
            canonicalize(&mut lhs);
            lhs == apply(phi[x], &f(j))
        })
    });
    if ok {
        Ok(())
    } else {
        Err(Error::IncompatibleCoefficients("f(g·m) ≠ φ(g)·f(m)".into()))
    }
}

/// Image of a degree-`p` chain under `(φ, f)`.
pub fn map_chain(src: &GroupHomology, tgt: &GroupHomology, phi: &[u32], f: CoeffMap, p: usize, z: &SparseVec) -> SparseVec {
    let (sbase, tbase) = (src.order - 1, tgt.order - 1);
    let mut out: SparseVec = Vec::new();
    for &(idx, c) in z {
        let (m, t) = decode(idx as usize, p, src.rank, sbase);
        let img: Vec<u32> = t.iter().map(|&g| phi[g as usize]).collect();
        if img.contains(&0) {
            continue;
        }
        for (k, d) in f(m) {
            out.push((encode(k, &img, tgt.rank, tbase), c * d));
        }
    }
    canonicalize(&mut out);
    out
}

/// `(φ, f)_* : H_p(G; M) → H_p(G'; M')` in the bases of the two computations.
pub fn induced_map(src: &GroupHomology, tgt: &GroupHomology, phi: &[u32], f: CoeffMap, p: usize) -> GroupHom {
    let cols = src.bases[p]
        .generators
        .par_iter()
        .map(|z| tgt.bases[p].classify(&map_chain(src, tgt, phi, f, p, z)))
        .collect();
    GroupHom { source: src.bases[p].group.clone(), target: tgt.bases[p].group.clone(), cols }
}

/// `f(j) = e_j`.
pub fn identity_coeffs(j: u32) -> SparseVec {
    vec![(j, 1)]
}

/// Report of a Shapiro comparison.
#[derive(Debug, Clone, Serialize)]
pub struct ShapiroReport {
    pub induced: Vec<FGAbelianGroup>,
    pub subgroup: Vec<FGAbelianGroup>,
    pub pass: bool,
}

/// Compares `H_p(G; Z[G/H])` with `H_p(H; Z)` for `p ≤ p_max`.
pub fn shapiro_check<G: GroupOps>(g: &G, h: &[u32], p_max: usize) -> Result<ShapiroReport> {
    let induced = bar_homology(g, &GModule::cosets(g, h), p_max)?.groups();
    let (sub, _) = TableGroup::subgroup(g, h)?;
    let subgroup = bar_homology(&sub, &GModule::trivial(&sub), p_max)?.groups();
    let pass = induced == subgroup;
    Ok(ShapiroReport { induced, subgroup, pass })
}

/// `H_1(G; Z)` through the abelianization, for groups too large for the bar complex.
pub struct Abelianization {
    pub quotient: TableGroup,
    pub projection: Vec<u32>,
    pub homology: GroupHomology,
}

pub fn abelianization(g: &FinGroup) -> Result<Abelianization> {
    let d = derived_subgroup(g, &g.generator_indices());
    let (quotient, projection) = TableGroup::quotient(g, &d)?;
    let homology = bar_homology(&quotient, &GModule::trivial(&quotient), 1)?;
    Ok(Abelianization { quotient, projection, homology })
}

/// Stabilizer of a sequence under a matrix group.
pub fn stabilizer(g: &FinGroup, v: &UnimodSeq, r: &Ring) -> Vec<u32> {
    let mut out: Vec<u32> = (0..g.order() as u32).into_par_iter().filter(|&x| &v.act(&g.matrix(x), r) == v).collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::sp_generators;

    fn cyclic(n: usize) -> TableGroup {
        TableGroup::from_table(n, (0..n * n).map(|ij| ((ij / n + ij % n) % n) as u32).collect()).unwrap()
    }

    #[test]
    fn cyclic_homology() {
        let g = cyclic(3);
        let h = bar_homology(&g, &GModule::trivial(&g), 3).unwrap();
        h.complex.check_d_squared().unwrap();
        let gs = h.groups();
        assert_eq!(gs[0], FGAbelianGroup::free(1));
        assert_eq!(gs[1], FGAbelianGroup::from_cyclic_orders(&[3]));
        assert!(gs[2].is_trivial());
        assert_eq!(gs[3], FGAbelianGroup::from_cyclic_orders(&[3]));
    }

    #[test]
    fn free_coefficients_vanish() {
        let g = cyclic(4);
        let h = bar_homology(&g, &GModule::cosets(&g, &[0]), 2).unwrap();
        let gs = h.groups();
        assert_eq!(gs[0], FGAbelianGroup::free(1));
        assert!(gs[1].is_trivial() && gs[2].is_trivial());
        let whole: Vec<u32> = (0..4).collect();
        assert!(shapiro_check(&g, &whole, 2).unwrap().pass);
    }

    #[test]
    fn sl2_f3() {
        let r = Ring::prime_field(3).unwrap();
        let g = FinGroup::enumerate(&sp_generators(2, &r), &r, 1000).unwrap();
        let h1 = bar_homology(&g, &GModule::trivial(&g), 1).unwrap();
        assert_eq!(h1.groups()[1], FGAbelianGroup::from_cyclic_orders(&[3]));
        let ab = abelianization(&g).unwrap();
        assert_eq!(ab.quotient.order(), 3);
        let id: Vec<u32> = (0..g.order() as u32).collect();
        let m = induced_map(&h1, &h1, &id, &identity_coeffs, 1);
        assert_eq!(m, GroupHom::identity(h1.group(1)));
    }

    #[test]
    fn induced_composition() {
        // Z/6 → Z/3 → Z/3 (x ↦ 2x)
        let z6 = cyclic(6);
        let z3 = cyclic(3);
        let pi: Vec<u32> = (0..6).map(|x| x % 3).collect();
        let dbl: Vec<u32> = (0..3).map(|x| (2 * x) % 3).collect();
        let h6 = bar_homology(&z6, &GModule::trivial(&z6), 2).unwrap();
        let h3 = bar_homology(&z3, &GModule::trivial(&z3), 2).unwrap();
        let comp: Vec<u32> = pi.iter().map(|&x| dbl[x as usize]).collect();
        for p in 0..=2 {
            let a = induced_map(&h6, &h3, &pi, &identity_coeffs, p);
            let b = induced_map(&h3, &h3, &dbl, &identity_coeffs, p);
            let c = induced_map(&h6, &h3, &comp, &identity_coeffs, p);
            assert_eq!(b.compose(&a), c);
        }
    }

    #[test]
    fn action_checks() {
        let r = Ring::prime_field(3).unwrap();
        let g = FinGroup::enumerate(&sp_generators(2, &r), &r, 1000).unwrap();
        let t = crate::unimodular::enumerate_u(1, 1, &r, 1000).unwrap();
        let m = GModule::sequences(&g, &t, &r).unwrap();
        let pairs: Vec<(u32, u32)> = (0..24).flat_map(|a| (0..24).map(move |b| (a, b))).collect();
        assert!(m.check_action(&g, &pairs));
        let id: Vec<u32> = (0..24).collect();
        assert!(check_compatible(&m, &m, &id, &identity_coeffs).is_ok());
        let bad = |j: u32| vec![(j.min(0), 1)];
        assert!(check_compatible(&m, &m, &id, &bad).is_err());
    }
}
