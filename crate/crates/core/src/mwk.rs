//! Milnor K-groups of residue fields and Milnor-Witt K-groups of small rings,
//! as lattice quotients of explicit presentations.

use crate::abelian::{FGAbelianGroup, Lattice};
use crate::error::{Error, Result};
use crate::intmatrix::IntMatrix;
use crate::ring::Ring;
use serde::{Deserialize, Serialize};

/// Presentations larger than this many generators are refused.
pub const MWK_CAP: usize = 20_000;

/// Ground ring of the tensor algebra over the augmentation ideal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TensorMode {
    /// Tensor products over `Z`.
    Integers,
    /// Tensor products over `Z[R*]`.
    GroupRing,
}

/// Pairs `(a, 1 − a)` of units.
pub fn steinberg_pairs(r: &Ring) -> Vec<(u64, u64)> {
    r.units().map(|a| (a, r.sub(1, a))).filter(|&(_, b)| r.is_unit(b)).collect()
}

/// Free lattice on words of length `n` over an alphabet of size `b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedPresentation {
    pub degree: usize,
    /// Letters, as ring elements.
    pub alphabet: Vec<u64>,
    pub relations: Vec<Vec<i64>>,
}

impl GradedPresentation {
    pub fn ngens(&self) -> usize {
        self.alphabet.len().pow(self.degree as u32)
    }

    pub fn encode(&self, word: &[usize]) -> usize {
        word.iter().fold(0, |acc, &x| acc * self.alphabet.len() + x)
    }

    pub fn decode(&self, mut i: usize) -> Vec<usize> {
        let b = self.alphabet.len();
        let mut w = vec![0; self.degree];
        for slot in w.iter_mut().rev() {
            *slot = i % b;
            i /= b;
        }
        w
    }

    pub fn group(&self) -> FGAbelianGroup {
        FGAbelianGroup::cokernel(&IntMatrix::from_cols_i64(self.ngens(), &self.relations))
    }

    pub fn relation_lattice(&self) -> Lattice {
        let mut l = Lattice::new(self.ngens());
        for c in &self.relations {
            l.insert(c);
        }
        l
    }

    fn letter(&self, a: u64) -> Option<usize> {
        self.alphabet.iter().position(|&x| x == a)
    }
}

fn words(b: usize, n: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = b.pow(n as u32);
    (0..total).map(move |mut i| {
        let mut w = vec![0; n];
        for slot in w.iter_mut().rev() {
            *slot = i % b;
            i /= b;
        }
        w
    })
}

fn check_cap(b: usize, n: usize) -> Result<()> {
    match b.checked_pow(n as u32) {
        Some(x) if x <= MWK_CAP => Ok(()),
        _ => Err(Error::CapExceeded(MWK_CAP)),
    }
}

/// Presentation of `K^M_n(F)` for the residue field `F` of `r`: symbols
/// `{a₁,…,aₙ}`, multilinear in each slot, with `{…, a, 1 − a, …} = 0`.
pub fn milnor_presentation(r: &Ring, n: usize) -> Result<GradedPresentation> {
    let f = Ring::prime_field(r.p)?;
    let alphabet: Vec<u64> = f.units().collect();
    let b = alphabet.len();
    check_cap(b, n)?;
    let mut pres = GradedPresentation { degree: n, alphabet, relations: Vec::new() };
    let total = pres.ngens();
    for slot in 0..n {
        for rest in words(b, n.saturating_sub(1)) {
            for x in 0..b {
                for y in 0..b {
                    let xy = pres.letter(f.mul(pres.alphabet[x], pres.alphabet[y])).expect("unit");
                    let at = |z: usize| {
                        let mut w = rest.clone();
                        w.insert(slot, z);
                        pres.encode(&w)
                    };
                    let mut col = vec![0i64; total];
                    col[at(xy)] += 1;
                    col[at(x)] -= 1;
                    col[at(y)] -= 1;
                    pres.relations.push(col);
                }
            }
        }
    }
    for (a, c) in steinberg_pairs(&f) {
        let (a, c) = (pres.letter(a).expect("unit"), pres.letter(c).expect("unit"));
        for slot in 0..n.saturating_sub(1) {
            for rest in words(b, n - 2) {
                let mut w = rest.clone();
                w.insert(slot, c);
                w.insert(slot, a);
                let mut col = vec![0i64; total];
                col[pres.encode(&w)] = 1;
                pres.relations.push(col);
            }
        }
    }
    Ok(pres)
}

pub fn milnor_k(r: &Ring, n: usize) -> Result<FGAbelianGroup> {
    Ok(milnor_presentation(r, n)?.group())
}

/// `⟨u⟩[a] = [ua] − [u]` in the basis `[a] = ⟨a⟩ − ⟨1⟩`, `a ≠ 1`, of `I[R*]`.
fn act_letter(pres: &GradedPresentation, r: &Ring, u: u64, x: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    if let Some(i) = pres.letter(r.mul(u, pres.alphabet[x])) {
        out.push((i, 1));
    }
    if let Some(i) = pres.letter(u) {
        out.push((i, -1));
    }
    out
}

/// Presentation of the degree-`n` part of the tensor algebra on `I[R*]`
/// modulo the ideal generated by `[a] ⊗ [1 − a]`.
pub fn milnor_witt_presentation(r: &Ring, n: usize, mode: TensorMode) -> Result<GradedPresentation> {
    let alphabet: Vec<u64> = r.units().filter(|&u| u != 1).collect();
    let b = alphabet.len();
    check_cap(b, n)?;
    let mut pres = GradedPresentation { degree: n, alphabet, relations: Vec::new() };
    let total = pres.ngens();
    let units: Vec<u64> = r.units().collect();
    let push_combo = |pres: &mut GradedPresentation, terms: Vec<(Vec<usize>, i64)>| {
        let mut col = vec![0i64; total];
        for (w, c) in terms {
            col[pres.encode(&w)] += c;
        }
        if col.iter().any(|&x| x != 0) {
            pres.relations.push(col);
        }
    };
    if b == 0 {
        return Ok(pres);
    }
    if mode == TensorMode::GroupRing {
        for slot in 0..n.saturating_sub(1) {
            for w in words(b, n) {
                for &u in &units[1..] {
                    let mut terms = Vec::new();
                    for (x, c) in act_letter(&pres, r, u, w[slot]) {
                        let mut v = w.clone();
                        v[slot] = x;
                        terms.push((v, c));
                    }
                    for (y, c) in act_letter(&pres, r, u, w[slot + 1]) {
                        let mut v = w.clone();
                        v[slot + 1] = y;
                        terms.push((v, -c));
                    }
                    push_combo(&mut pres, terms);
                }
            }
        }
    }
    for (a, c) in steinberg_pairs(r) {
        let (Some(a), Some(c)) = (pres.letter(a), pres.letter(c)) else { continue };
        for slot in 0..n.saturating_sub(1) {
            for rest in words(b, n - 2) {
                let mut w = rest.clone();
                w.insert(slot, c);
                w.insert(slot, a);
                push_combo(&mut pres, vec![(w.clone(), 1)]);
                if mode == TensorMode::GroupRing {
                    for &u in &units[1..] {
                        let terms = act_letter(&pres, r, u, w[0])
                            .into_iter()
                            .map(|(x, k)| {
                                let mut v = w.clone();
                                v[0] = x;
                                (v, k)
                            })
                            .collect();
                        push_combo(&mut pres, terms);
                    }
                }
            }
        }
    }
    Ok(pres)
}

pub fn milnor_witt_k(r: &Ring, n: usize, mode: TensorMode) -> Result<FGAbelianGroup> {
    Ok(milnor_witt_presentation(r, n, mode)?.group())
}

/// Concatenation `K_m ⊗ K_n → K_{m+n}` sends relations to relations.
pub fn product_well_defined(r: &Ring, m: usize, n: usize, mode: TensorMode) -> Result<bool> {
    let pm = milnor_witt_presentation(r, m, mode)?;
    let pn = milnor_witt_presentation(r, n, mode)?;
    let pmn = milnor_witt_presentation(r, m + n, mode)?;
    let lattice = pmn.relation_lattice();
    let concat = |rel: &[i64], word: &[usize], left: bool, pres: &GradedPresentation| -> Vec<i64> {
        let mut col = vec![0i64; pmn.ngens()];
        for (i, &c) in rel.iter().enumerate() {
            if c != 0 {
                let w = pres.decode(i);
                let full: Vec<usize> =
                    if left { w.iter().chain(word).copied().collect() } else { word.iter().chain(&w).copied().collect() };
                col[pmn.encode(&full)] += c;
            }
        }
        col
    };
    let b = pm.alphabet.len();
    for rel in &pm.relations {
        for w in words(b, n) {
            if !lattice.contains(&concat(rel, &w, true, &pm)) {
                return Ok(false);
            }
        }
    }
    for rel in &pn.relations {
        for w in words(b, m) {
            if !lattice.contains(&concat(rel, &w, false, &pn)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `[a₁] ⊗ … ⊗ [aₙ] ↦ {ā₁, …, āₙ}` is well-defined and onto.
#[derive(Debug, Clone, Serialize)]
pub struct SurjectionReport {
    pub well_defined: bool,
    pub onto: bool,
}

pub fn milnor_surjection(r: &Ring, n: usize, mode: TensorMode) -> Result<SurjectionReport> {
    let mw = milnor_witt_presentation(r, n, mode)?;
    let mk = milnor_presentation(r, n)?;
    let f = Ring::prime_field(r.p)?;
    let image = |i: usize| -> Vec<i64> {
        let w: Vec<usize> =
            mw.decode(i).iter().map(|&x| mk.letter(mw.alphabet[x] % f.modulus).expect("unit residue")).collect();
        let mut col = vec![0i64; mk.ngens()];
        col[mk.encode(&w)] = 1;
        col
    };
    let lattice = mk.relation_lattice();
    let well_defined = mw.relations.iter().all(|rel| {
        let mut col = vec![0i64; mk.ngens()];
        for (i, &c) in rel.iter().enumerate() {
            if c != 0 {
                for (x, y) in col.iter_mut().zip(image(i)) {
                    *x += c * y;
                }
            }
        }
        lattice.contains(&col)
    });
    let mut cols = mk.relations.clone();
    cols.extend((0..mw.ngens()).map(image));
    let onto = FGAbelianGroup::cokernel(&IntMatrix::from_cols_i64(mk.ngens(), &cols)).is_trivial();
    Ok(SurjectionReport { well_defined, onto })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(s: &str) -> Ring {
        Ring::parse(s).unwrap()
    }

    #[test]
    fn steinberg_examples() {
        assert_eq!(steinberg_pairs(&ring("3")), vec![(2, 2)]);
        assert!(steinberg_pairs(&ring("2")).is_empty());
        let a: Vec<u64> = steinberg_pairs(&ring("3^2")).iter().map(|x| x.0).collect();
        assert_eq!(a, vec![2, 5, 8]);
    }

    #[test]
    fn milnor_small() {
        assert_eq!(milnor_k(&ring("5"), 0).unwrap(), FGAbelianGroup::free(1));
        assert_eq!(milnor_k(&ring("5"), 1).unwrap(), FGAbelianGroup::from_cyclic_orders(&[4]));
        assert!(milnor_k(&ring("3"), 2).unwrap().is_trivial());
        assert!(milnor_k(&ring("5"), 2).unwrap().is_trivial());
        assert!(milnor_k(&ring("7"), 2).unwrap().is_trivial());
    }

    #[test]
    fn mw_trivial_units() {
        for mode in [TensorMode::Integers, TensorMode::GroupRing] {
            for n in 1..4 {
                assert!(milnor_witt_k(&ring("2"), n, mode).unwrap().is_trivial());
            }
        }
    }

    #[test]
    fn mw_degree_one_is_augmentation_ideal() {
        assert_eq!(milnor_witt_k(&ring("5"), 1, TensorMode::GroupRing).unwrap(), FGAbelianGroup::free(3));
    }

    #[test]
    fn mw_products_and_surjection() {
        for s in ["3", "5", "3^2"] {
            let r = ring(s);
            for mode in [TensorMode::Integers, TensorMode::GroupRing] {
                assert!(product_well_defined(&r, 1, 1, mode).unwrap());
                assert!(product_well_defined(&r, 1, 2, mode).unwrap());
                let rep = milnor_surjection(&r, 2, mode).unwrap();
                assert!(rep.well_defined && rep.onto, "{s} {mode:?}");
            }
        }
    }
}
