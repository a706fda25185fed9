//! Homology of the groups `Sp_k(R)` for small `R`: the maps `f_v`, the Shapiro
//! identification, the `d¹` square, the relative decomposition of `H_p(Sp_{2n+1})`
//! and its `Z₀[R]`-module structure.

use crate::abelian::{subgroup_structure, FGAbelianGroup};
use crate::error::{Error, Result};
use crate::group::{FinGroup, DEFAULT_CAP};
use crate::grouphomology::{
    abelianization, bar_homology, check_compatible, identity_coeffs, induced_map, stabilizer, GModule, GroupHomology,
};
use crate::homology::GroupHom;
use crate::matrix::{det, RingMatrix};
use crate::module::{quasilinear_probe, FinZ0RModule, ProbeReport};
use crate::monoidring::PolyR;
use crate::ring::Ring;
use crate::sparse::SparseVec;
use crate::symplectic::{conj_diag, embed, monoid_act, odd_decompose, sp_generators};
use crate::unimodular::{enumerate_skew_plus, enumerate_u, gram, key_of, normal_form, SeqTable, UnimodSeq};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

pub fn sp_group(k: usize, r: &Ring) -> Result<FinGroup> {
    FinGroup::enumerate(&sp_generators(k, r), r, DEFAULT_CAP)
}

/// Element images of `ε : Sp_a → Sp_b`.
pub fn embedding(src: &FinGroup, a: usize, tgt: &FinGroup, b: usize, r: &Ring) -> Result<Vec<u32>> {
    let bad = std::sync::atomic::AtomicBool::new(false);
    let out = src.map_into(tgt, |m| {
        embed(m, a, b, r).unwrap_or_else(|_| {
            bad.store(true, std::sync::atomic::Ordering::Relaxed);
            m.clone()
        })
    })?;
    if bad.into_inner() {
        return Err(Error::RankOrder { r: a, s: b });
    }
    Ok(out)
}

/// `ρ : Sp_{2n+1} → Sp_{2n}`.
pub fn rho_map(odd: &FinGroup, even: &FinGroup, r: &Ring) -> Result<Vec<u32>> {
    odd.map_into(even, |m| odd_decompose(m, r).expect("odd symplectic").rho().mat)
}

/// `⟨a⟩ : Sp_{2n+1} → Sp_{2n+1}`.
pub fn monoid_map(odd: &FinGroup, a: u64, r: &Ring) -> Result<Vec<u32>> {
    odd.map_into(odd, |m| monoid_act(a, &odd_decompose(m, r).expect("odd symplectic"), r).to_matrix(r))
}

/// `c_a` on a group of matrices, conjugation by `diag(a, a⁻¹, 1, …)`.
pub fn conj_map(g: &FinGroup, a: u64, r: &Ring) -> Result<Vec<u32>> {
    r.inv(a)?;
    g.map_into(g, |m| conj_diag(a, m, r).expect("unit"))
}

fn add_homs(a: &GroupHom, b: &GroupHom, sign: i64) -> GroupHom {
    let orders = a.target.coordinate_orders();
    let cols = a
        .cols
        .iter()
        .zip(&b.cols)
        .map(|(x, y)| {
            let mut v: Vec<i64> = x.iter().zip(y).map(|(p, q)| p + sign * q).collect();
            crate::abelian::normalize(&orders, &mut v);
            v
        })
        .collect();
    GroupHom { source: a.source.clone(), target: a.target.clone(), cols }
}

/// Whether `v` lies in the first `q` coordinates and is a basis of `R^q` there.
pub fn spans_leading(v: &UnimodSeq, r: &Ring) -> bool {
    let q = v.len();
    if v.vectors.iter().any(|x| x[q..].iter().any(|&c| c != 0)) {
        return false;
    }
    let top: Vec<Vec<u64>> = v.vectors.iter().map(|x| x[..q].to_vec()).collect();
    r.is_unit(leading_det(&top, r))
}

fn leading_det(cols: &[Vec<u64>], r: &Ring) -> u64 {
    det(&RingMatrix::from_cols(cols.len(), cols), r).expect("square")
}

/// The data behind `f_v : H_p(Sp_{2n−q}) → H_p(Sp_{2n}; Z[U_q(R^{2n})])`.
#[derive(Debug, Clone)]
pub struct ShapiroSetup {
    pub ring: Ring,
    pub n: usize,
    pub q: usize,
    pub p_max: usize,
    pub small: FinGroup,
    pub big: FinGroup,
    pub table: SeqTable,
    pub module: GModule,
    pub h_small: GroupHomology,
    pub h_big: GroupHomology,
}

impl ShapiroSetup {
    pub fn new(r: &Ring, n: usize, q: usize, p_max: usize) -> Result<Self> {
        if q > 2 * n {
            return Err(Error::RankBound { q, bound: 2 * n });
        }
        let small = sp_group(2 * n - q, r)?;
        let big = sp_group(2 * n, r)?;
        let table = enumerate_u(q, n, r, DEFAULT_CAP)?;
        let module = GModule::sequences(&big, &table, r)?;
        let h_small = bar_homology(&small, &GModule::trivial(&small), p_max)?;
        let h_big = bar_homology(&big, &module, p_max)?;
        Ok(ShapiroSetup { ring: r.clone(), n, q, p_max, small, big, table, module, h_small, h_big })
    }

    /// Element images of `ε ∘ c_{det v}` (odd `q`) or `ε` (even `q`).
    pub fn phi(&self, v: &UnimodSeq) -> Result<Vec<u32>> {
        let r = &self.ring;
        let (n2, q) = (2 * self.n, self.q);
        let a = if q % 2 == 1 { Some(leading_det(&v.vectors.iter().map(|x| x[..q].to_vec()).collect::<Vec<_>>(), r)) } else { None };
        self.small.map_into(&self.big, |m| {
            let m = match a {
                Some(a) => conj_diag(a, m, r).expect("unit determinant"),
                None => m.clone(),
            };
            embed(&m, n2 - q, n2, r).expect("rank order")
        })
    }

    /// `f_v` in degrees `0..=p_max`.
    pub fn f_v(&self, v: &UnimodSeq) -> Result<Vec<GroupHom>> {
        if !spans_leading(v, &self.ring) {
            return Err(Error::InputNotNondegenerate);
        }
        let idx = self.table.find(&key_of(v)).ok_or(Error::InputNotNondegenerate)? as u32;
        let phi = self.phi(v)?;
        let f = move |_: u32| -> SparseVec { vec![(idx, 1)] };
        check_compatible(&GModule::trivial(&self.small), &self.module, &phi, &f)?;
        Ok((0..=self.p_max).map(|p| induced_map(&self.h_small, &self.h_big, &phi, &f, p)).collect())
    }
}

/// `H_p(Sp_{2n}; Z[U_q])` against `⊕_{A ∈ Skew⁺_q} H_p(Stab(v_A); Z)`, and the
/// combined map `⊕ f_{v_A}` checked to be onto.
#[derive(Debug, Clone, Serialize)]
pub struct E1Report {
    pub n: usize,
    pub q: usize,
    pub coefficients: Vec<FGAbelianGroup>,
    pub stabilizers: Vec<FGAbelianGroup>,
    pub stabilizer_is_small_group: bool,
    pub f_onto: bool,
    pub pass: bool,
}

fn direct_sum(parts: &[FGAbelianGroup]) -> FGAbelianGroup {
    let mut orders = Vec::new();
    for g in parts {
        orders.extend(g.coordinate_orders());
    }
    FGAbelianGroup::from_cyclic_orders(&orders)
}

pub fn e1_identification(setup: &ShapiroSetup) -> Result<E1Report> {
    let r = &setup.ring;
    let skews = enumerate_skew_plus(setup.q, r, DEFAULT_CAP)?;
    let mut stab_parts: Vec<Vec<FGAbelianGroup>> = vec![Vec::new(); setup.p_max + 1];
    let mut maps: Vec<Vec<GroupHom>> = vec![Vec::new(); setup.p_max + 1];
    let mut same = true;
    for a in &skews {
        let v = normal_form(a, setup.n, r)?;
        let st = stabilizer(&setup.big, &v, r);
        let (sub, _) = crate::grouphomology::TableGroup::subgroup(&setup.big, &st)?;
        let hs = bar_homology(&sub, &GModule::trivial(&sub), setup.p_max)?;
        let mut img = setup.phi(&v)?;
        img.sort_unstable();
        img.dedup();
        same &= img == st;
        for (p, g) in hs.groups().into_iter().enumerate() {
            stab_parts[p].push(g);
        }
        for (p, f) in setup.f_v(&v)?.into_iter().enumerate() {
            maps[p].push(f);
        }
    }
    let coefficients = setup.h_big.groups();
    let stabilizers: Vec<FGAbelianGroup> = stab_parts.iter().map(|v| direct_sum(v)).collect();
    let mut onto = true;
    for p in 0..=setup.p_max {
        let target = &coefficients[p];
        let cols: Vec<Vec<i64>> = maps[p].iter().flat_map(|f| f.cols.iter().cloned()).collect();
        onto &= subgroup_structure(&target.coordinate_orders(), &cols) == *target;
    }
    let pass = same && onto && coefficients == stabilizers;
    Ok(E1Report { n: setup.n, q: setup.q, coefficients, stabilizers, stabilizer_is_small_group: same, f_onto: onto, pass })
}

/// `f_u = f_v` whenever `Γ(u) = Γ(v)`, over all `u, v ∈ U_q` spanning `R^q`.
#[derive(Debug, Clone, Serialize)]
pub struct VIndepReport {
    pub n: usize,
    pub q: usize,
    pub sequences: usize,
    pub classes: usize,
    pub comparisons: usize,
    pub pass: bool,
}

pub fn vindep_check(setup: &ShapiroSetup) -> Result<VIndepReport> {
    let r = &setup.ring;
    let mut classes: BTreeMap<crate::unimodular::SkewMat, Vec<UnimodSeq>> = BTreeMap::new();
    let mut count = 0;
    for v in setup.table.iter() {
        if spans_leading(&v, r) {
            count += 1;
            classes.entry(gram(&v, r)).or_default().push(v);
        }
    }
    let mut comparisons = 0;
    let mut pass = true;
    for seqs in classes.values() {
        let first = setup.f_v(&seqs[0])?;
        for v in &seqs[1..] {
            comparisons += 1;
            pass &= setup.f_v(v)? == first;
        }
    }
    Ok(VIndepReport { n: setup.n, q: setup.q, sequences: count, classes: classes.len(), comparisons, pass })
}

/// The square `(1, d)_* ∘ f_u = Σ_i (−1)^{i+1} f_{v_i} ∘ ε_*` on
/// `H_p(Sp_{2n−q−1}) ⊗ Z[Skew⁺_{q+1}]`, with `u` a normal form of `A` and `v_i` of `d_i A`.
#[derive(Debug, Clone, Serialize)]
pub struct D1Report {
    pub n: usize,
    pub q: usize,
    pub p_max: usize,
    pub labels: usize,
    pub pass: bool,
}

pub fn d1_square(upper: &ShapiroSetup, lower: &ShapiroSetup) -> Result<D1Report> {
    let r = &upper.ring;
    let (n, q) = (lower.n, lower.q);
    if upper.q != q + 1 || upper.n != n || upper.p_max != lower.p_max {
        return Err(Error::Shape("setups must be for q+1 and q".into()));
    }
    let eps = embedding(&upper.small, 2 * n - q - 1, &lower.small, 2 * n - q, r)?;
    let up_t = &upper.table;
    let low_t = &lower.table;
    let d = |j: u32| -> SparseVec {
        let mut out: SparseVec = (0..up_t.q)
            .map(|i| (low_t.find(&up_t.face_key(j as usize, i)).expect("face in table") as u32, if i % 2 == 0 { 1 } else { -1 }))
            .collect();
        crate::sparse::canonicalize(&mut out);
        out
    };
    let id: Vec<u32> = (0..upper.big.order() as u32).collect();
    check_compatible(&upper.module, &lower.module, &id, &d)?;
    let skews = enumerate_skew_plus(q + 1, r, DEFAULT_CAP)?;
    let mut pass = true;
    for p in 0..=upper.p_max {
        let d1 = induced_map(&upper.h_big, &lower.h_big, &id, &d, p);
        let eps_p = induced_map(&upper.h_small, &lower.h_small, &eps, &identity_coeffs, p);
        for a in &skews {
            let u = normal_form(a, n, r)?;
            let lhs = d1.compose(&upper.f_v(&u)?[p]);
            let mut rhs = GroupHom::zero(&lhs.source, &lhs.target);
            for i in 0..=q {
                let v = normal_form(&a.face(i), n, r)?;
                let term = lower.f_v(&v)?[p].compose(&eps_p);
                rhs = add_homs(&rhs, &term, if i % 2 == 0 { 1 } else { -1 });
            }
            pass &= lhs == rhs;
        }
    }
    Ok(D1Report { n, q, p_max: upper.p_max, labels: skews.len(), pass })
}

/// The `n = 1` instance: `d¹ ∘ f_{e₁} = ε_*` from `H_p(Sp₁)` to `H_p(Sp₂; Z)`,
/// together with `f_{e₁}` being an isomorphism onto `H_p(Sp₂; Z[U₁])`.
#[derive(Debug, Clone, Serialize)]
pub struct D1ShapiroReport {
    pub p_max: usize,
    pub source: Vec<FGAbelianGroup>,
    pub coefficients: Vec<FGAbelianGroup>,
    pub shapiro: bool,
    pub square: bool,
    pub pass: bool,
}

pub fn d1_shapiro_square(r: &Ring, p_max: usize) -> Result<D1ShapiroReport> {
    let s1 = ShapiroSetup::new(r, 1, 1, p_max)?;
    let s0 = ShapiroSetup::new(r, 1, 0, p_max)?;
    let e1 = e1_identification(&s1)?;
    let sq = d1_square(&s1, &s0)?;
    Ok(D1ShapiroReport {
        p_max,
        source: s1.h_small.groups(),
        coefficients: e1.coefficients.clone(),
        shapiro: e1.pass,
        square: sq.pass,
        pass: e1.pass && sq.pass,
    })
}

/// `H_p(Sp_{2n+1}) = Im(ερ)_* ⊕ Im(1 − (ερ)_*)` together with the monoid action.
#[derive(Debug, Clone)]
pub struct RelativeDecomposition {
    pub ring: Ring,
    pub n: usize,
    pub p_max: usize,
    pub even: FinGroup,
    pub odd: FinGroup,
    pub eps: Vec<u32>,
    pub rho: Vec<u32>,
    pub h_even: GroupHomology,
    pub h_odd: GroupHomology,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionSummary {
    pub p: usize,
    pub h_odd: FGAbelianGroup,
    pub h_even: FGAbelianGroup,
    pub image: FGAbelianGroup,
    pub tilde: FGAbelianGroup,
    pub idempotent: bool,
}

impl RelativeDecomposition {
    pub fn new(r: &Ring, n: usize, p_max: usize) -> Result<Self> {
        let even = sp_group(2 * n, r)?;
        let odd = sp_group(2 * n + 1, r)?;
        let eps = embedding(&even, 2 * n, &odd, 2 * n + 1, r)?;
        let rho = rho_map(&odd, &even, r)?;
        let h_even = bar_homology(&even, &GModule::trivial(&even), p_max)?;
        let h_odd = bar_homology(&odd, &GModule::trivial(&odd), p_max)?;
        Ok(RelativeDecomposition { ring: r.clone(), n, p_max, even, odd, eps, rho, h_even, h_odd })
    }

    /// `(ερ)_*` on `H_p(Sp_{2n+1})`.
    pub fn projector(&self, p: usize) -> GroupHom {
        let er: Vec<u32> = self.rho.iter().map(|&x| self.eps[x as usize]).collect();
        induced_map(&self.h_odd, &self.h_odd, &er, &identity_coeffs, p)
    }

    pub fn eps_star(&self, p: usize) -> GroupHom {
        induced_map(&self.h_even, &self.h_odd, &self.eps, &identity_coeffs, p)
    }

    pub fn rho_star(&self, p: usize) -> GroupHom {
        induced_map(&self.h_odd, &self.h_even, &self.rho, &identity_coeffs, p)
    }

    /// `1 − (ερ)_*`.
    pub fn complement(&self, p: usize) -> GroupHom {
        add_homs(&GroupHom::identity(self.h_odd.group(p)), &self.projector(p), -1)
    }

    pub fn summary(&self, p: usize) -> DecompositionSummary {
        let pr = self.projector(p);
        DecompositionSummary {
            p,
            h_odd: self.h_odd.group(p).clone(),
            h_even: self.h_even.group(p).clone(),
            image: pr.image_structure(),
            tilde: self.complement(p).image_structure(),
            idempotent: pr.compose(&pr) == pr,
        }
    }

    /// `⟨a⟩_*` on `H_p(Sp_{2n+1})`.
    pub fn monoid_matrix(&self, a: u64, p: usize) -> Result<GroupHom> {
        let m = monoid_map(&self.odd, a, &self.ring)?;
        Ok(induced_map(&self.h_odd, &self.h_odd, &m, &identity_coeffs, p))
    }

    /// `⟨a⟩_* ⟨b⟩_* = ⟨ab⟩_*` for all `a, b ∈ R`.
    pub fn monoid_functorial(&self, p: usize) -> Result<bool> {
        let r = &self.ring;
        let mats: Vec<GroupHom> = r.elements().map(|a| self.monoid_matrix(a, p)).collect::<Result<_>>()?;
        Ok(r.elements().all(|a| {
            r.elements().all(|b| mats[a as usize].compose(&mats[b as usize]) == mats[r.mul(a, b) as usize])
        }))
    }

    /// `H̃_p(Sp_{2n+1})` as a `Z₀[R]`-module.
    pub fn tilde_module(&self, p: usize) -> Result<FinZ0RModule> {
        let r = &self.ring;
        let orders = self.h_odd.group(p).coordinate_orders();
        let action: Vec<Vec<Vec<i64>>> =
            r.elements().map(|a| self.monoid_matrix(a, p).map(|m| m.cols)).collect::<Result<_>>()?;
        let gens = self.complement(p).cols;
        Ok(FinZ0RModule::new(r, orders, action)?.with_generators(gens))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasiLinearityReport {
    pub p: usize,
    pub degree: usize,
    pub m: usize,
    pub bound_holds: bool,
    pub probe: ProbeReport,
    /// `pass` of the probe when the bound holds, `true` otherwise.
    pub pass: bool,
}

/// Random probes of `(s_poly(a) − ⟨poly(0)⟩)⁻¹ H̃_p = 0`, asserted when `2p·deg < m`.
pub fn relative_quasilinearity_check(
    decomp: &RelativeDecomposition,
    p: usize,
    poly: &PolyR,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<QuasiLinearityReport> {
    let module = decomp.tilde_module(p)?;
    let degree = poly.degree();
    let bound_holds = p * degree * 2 < m;
    let probe = quasilinear_probe(&module, poly, m, trials, seed);
    let pass = !bound_holds || probe.pass;
    Ok(QuasiLinearityReport { p, degree, m, bound_holds, probe, pass })
}

#[derive(Debug, Clone, Serialize)]
pub struct StableReport {
    pub p: usize,
    pub target: FGAbelianGroup,
    pub composite_zero: bool,
    pub block_form: bool,
}

impl StableReport {
    pub fn pass(&self) -> bool {
        self.composite_zero && self.block_form
    }
}

/// `H̃_p(Sp_{2n+1}) → H_p(Sp_{2n+2})` is zero and `H_p(Sp_{2n+1}) → H_p(Sp_{2n+2})` equals `ε_* ∘ ρ_*`.
/// For `p = 1` the target is computed through the abelianization.
pub fn stable_surjection_check(decomp: &RelativeDecomposition, p: usize) -> Result<StableReport> {
    let r = &decomp.ring;
    let n = decomp.n;
    let top = sp_group(2 * n + 2, r)?;
    let incl = embedding(&decomp.odd, 2 * n + 1, &top, 2 * n + 2, r)?;
    let eps2 = embedding(&decomp.even, 2 * n, &top, 2 * n + 2, r)?;
    let (h_top, proj): (GroupHomology, Vec<u32>) = match bar_homology(&top, &GModule::trivial(&top), p) {
        Ok(h) => (h, (0..top.order() as u32).collect()),
        Err(Error::CapExceeded(c)) => {
            if p > 1 {
                return Err(Error::CapExceeded(c));
            }
            let ab = abelianization(&top)?;
            (ab.homology, ab.projection)
        }
        Err(e) => return Err(e),
    };
    let incl: Vec<u32> = incl.iter().map(|&x| proj[x as usize]).collect();
    let eps2: Vec<u32> = eps2.iter().map(|&x| proj[x as usize]).collect();
    let incl_star = induced_map(&decomp.h_odd, &h_top, &incl, &identity_coeffs, p);
    let eps2_star = induced_map(&decomp.h_even, &h_top, &eps2, &identity_coeffs, p);
    let composite_zero = incl_star.compose(&decomp.complement(p)).is_zero();
    let block_form = incl_star == eps2_star.compose(&decomp.rho_star(p));
    Ok(StableReport { p, target: h_top.group(p).clone(), composite_zero, block_form })
}

/// `(c_a)_* = 1` on `H_p(G; Z)` for every unit `a`.
pub fn conjugation_trivial(g: &FinGroup, h: &GroupHomology, r: &Ring) -> Result<bool> {
    let units: Vec<u64> = r.units().collect();
    let maps: Vec<Vec<u32>> = units.iter().map(|&a| conj_map(g, a, r)).collect::<Result<_>>()?;
    Ok(maps.par_iter().all(|m| {
        (0..=h.p_max).all(|p| induced_map(h, h, m, &identity_coeffs, p) == GroupHom::identity(h.group(p)))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Ring {
        Ring::prime_field(3).unwrap()
    }

    #[test]
    fn shapiro_n1_q1() {
        let s = ShapiroSetup::new(&f3(), 1, 1, 2).unwrap();
        let rep = e1_identification(&s).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(
            rep.coefficients,
            vec![FGAbelianGroup::free(1), FGAbelianGroup::from_cyclic_orders(&[3]), FGAbelianGroup::zero()]
        );
    }

    #[test]
    fn vindep_q1() {
        let s = ShapiroSetup::new(&f3(), 1, 1, 1).unwrap();
        let rep = vindep_check(&s).unwrap();
        assert!(rep.pass);
        assert_eq!((rep.sequences, rep.classes, rep.comparisons), (2, 1, 1));
    }

    #[test]
    fn d1_square_n1() {
        let r = f3();
        let s0 = ShapiroSetup::new(&r, 1, 0, 1).unwrap();
        let s1 = ShapiroSetup::new(&r, 1, 1, 1).unwrap();
        assert!(d1_square(&s1, &s0).unwrap().pass);
        let s2 = ShapiroSetup::new(&r, 1, 2, 1).unwrap();
        assert!(d1_square(&s2, &s1).unwrap().pass);
    }

    #[test]
    fn d1_shapiro_p2() {
        let rep = d1_shapiro_square(&f3(), 2).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn conjugation_sl2() {
        let r = f3();
        let g = sp_group(2, &r).unwrap();
        let h = bar_homology(&g, &GModule::trivial(&g), 2).unwrap();
        assert!(conjugation_trivial(&g, &h, &r).unwrap());
    }

    #[test]
    fn relative_sp3() {
        let r = f3();
        let d = RelativeDecomposition::new(&r, 1, 1).unwrap();
        let s0 = d.summary(0);
        assert!(s0.idempotent && s0.tilde.is_trivial());
        let s1 = d.summary(1);
        assert!(s1.idempotent);
        assert_eq!(s1.image, s1.h_even);
        assert!(d.monoid_functorial(1).unwrap());
        let rep = relative_quasilinearity_check(&d, 1, &PolyR::x(), 3, 20, 5).unwrap();
        assert!(rep.bound_holds && rep.pass);
        let st = stable_surjection_check(&d, 1).unwrap();
        assert!(st.pass(), "{st:?}");
    }
}
