//! Symplectic groups `Sp_n(R)` for all `n ≥ 0`, including the odd groups
//! `Sp_{2n+1}(R) ⊂ Sp_{2n+2}(R)` fixing `e₁`.

use crate::error::{Error, Result};
use crate::matrix::RingMatrix;
use crate::ring::Ring;
use serde::{Deserialize, Serialize};

/// `ψ_{2n} = ψ₂ ⊥ … ⊥ ψ₂` with `ψ₂ = [[0,1],[−1,0]]`.
pub fn standard_symplectic_form(n: usize, r: &Ring) -> RingMatrix {
    let mut m = RingMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m.set(2 * i, 2 * i + 1, 1 % r.modulus);
        m.set(2 * i + 1, 2 * i, r.neg(1));
    }
    m
}

/// `⟨x, y⟩ = ᵗx ψ y`.
pub fn form(x: &[u64], y: &[u64], r: &Ring) -> u64 {
    assert_eq!(x.len(), y.len());
    let mut acc = 0;
    for i in (0..x.len()).step_by(2) {
        acc = r.add(acc, r.sub(r.mul(x[i], y[i + 1]), r.mul(x[i + 1], y[i])));
    }
    acc
}

pub fn is_symplectic(a: &RingMatrix, r: &Ring) -> Result<bool> {
    if !a.is_square() {
        return Err(Error::NotSquare { rows: a.rows, cols: a.cols });
    }
    if a.rows % 2 == 1 {
        return Err(Error::OddSize(a.rows));
    }
    let n = a.rows;
    for i in 0..n {
        for j in 0..n {
            let expect = match (i % 2, j) {
                (0, j) if j == i + 1 => 1 % r.modulus,
                (1, j) if j + 1 == i => r.neg(1),
                _ => 0,
            };
            if form(&a.col(i), &a.col(j), r) != expect {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// An element of `Sp_{2n}(R)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpElement {
    pub mat: RingMatrix,
}

impl SpElement {
    pub fn new(mat: RingMatrix, r: &Ring) -> Result<Self> {
        if is_symplectic(&mat, r)? {
            Ok(SpElement { mat })
        } else {
            Err(Error::Shape("matrix is not symplectic".into()))
        }
    }

    pub fn identity(n: usize) -> Self {
        SpElement { mat: RingMatrix::identity(2 * n) }
    }

    /// Half-rank `n`.
    pub fn n(&self) -> usize {
        self.mat.rows / 2
    }
}

/// An element `(c, u, M)` of `Sp_{2n+1}(R)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OddSpElement {
    pub c: u64,
    pub u: Vec<u64>,
    pub m: SpElement,
}

impl OddSpElement {
    pub fn identity(n: usize) -> Self {
        OddSpElement { c: 0, u: vec![0; 2 * n], m: SpElement::identity(n) }
    }

    pub fn n(&self) -> usize {
        self.m.n()
    }

    pub fn to_matrix(&self, r: &Ring) -> RingMatrix {
        odd_compose(self.c, &self.u, &self.m, r)
    }

    /// `ρ : Sp_{2n+1} → Sp_{2n}`.
    pub fn rho(&self) -> SpElement {
        self.m.clone()
    }
}

/// The matrix `[[1, c, ᵗuψM], [0, 1, 0], [0, u, M]]`.
pub fn odd_compose(c: u64, u: &[u64], m: &SpElement, r: &Ring) -> RingMatrix {
    let n2 = m.mat.rows;
    assert_eq!(u.len(), n2);
    let mut a = RingMatrix::zeros(n2 + 2, n2 + 2);
    a.set(0, 0, 1 % r.modulus);
    a.set(0, 1, c);
    a.set(1, 1, 1 % r.modulus);
    for j in 0..n2 {
        a.set(0, j + 2, form(u, &m.mat.col(j), r));
        a.set(j + 2, 1, u[j]);
        for i in 0..n2 {
            a.set(i + 2, j + 2, m.mat.get(i, j));
        }
    }
    a
}

pub fn odd_decompose(a: &RingMatrix, r: &Ring) -> Result<OddSpElement> {
    if !a.is_square() || a.rows < 2 || a.rows % 2 == 1 || !is_symplectic(a, r)? {
        return Err(Error::NotOddSymplectic);
    }
    let n2 = a.rows - 2;
    let fixes_e1 = (0..a.rows).all(|i| a.get(i, 0) == if i == 0 { 1 % r.modulus } else { 0 });
    let row1 = (0..a.rows).all(|j| a.get(1, j) == if j == 1 { 1 % r.modulus } else { 0 });
    if !fixes_e1 || !row1 {
        return Err(Error::NotOddSymplectic);
    }
    let u: Vec<u64> = (0..n2).map(|i| a.get(i + 2, 1)).collect();
    let idx: Vec<usize> = (2..a.rows).collect();
    let m = SpElement { mat: a.submatrix(&idx, &idx) };
    let g = OddSpElement { c: a.get(0, 1), u, m };
    if g.to_matrix(r) != *a {
        return Err(Error::NotOddSymplectic);
    }
    Ok(g)
}

/// Matrix size used for `Sp_k`: `k` for even `k`, `k + 1` for odd `k`.
pub fn matrix_size(k: usize) -> usize {
    k + (k % 2)
}

/// `ε^s_r : Sp_r → Sp_s` on matrices.
pub fn embed(a: &RingMatrix, r_rank: usize, s_rank: usize, r: &Ring) -> Result<RingMatrix> {
    if r_rank > s_rank {
        return Err(Error::RankOrder { r: r_rank, s: s_rank });
    }
    if a.rows != matrix_size(r_rank) {
        return Err(Error::Shape(format!("expected size {} for Sp_{}", matrix_size(r_rank), r_rank)));
    }
    let mut cur = a.clone();
    for k in r_rank..s_rank {
        if k % 2 == 0 {
            cur = RingMatrix::identity(2).scale(1, r).direct_sum(&cur);
        }
    }
    Ok(cur)
}

/// `(c, u, M) ↦ (a²c, a·u, M)`.
pub fn monoid_act(a: u64, g: &OddSpElement, r: &Ring) -> OddSpElement {
    OddSpElement {
        c: r.mul(r.mul(a, a), g.c),
        u: g.u.iter().map(|&x| r.mul(a, x)).collect(),
        m: g.m.clone(),
    }
}

/// Conjugation by `diag(a, a⁻¹, 1, …, 1)`.
pub fn conj_diag(a: u64, g: &RingMatrix, r: &Ring) -> Result<RingMatrix> {
    let ai = r.inv(a)?;
    let n = g.rows;
    let scale = |i: usize| match i {
        0 => a,
        1 => ai,
        _ => 1 % r.modulus,
    };
    let mut out = g.clone();
    for i in 0..n {
        for j in 0..n {
            // D A D⁻¹ has entries d_i a_ij d_j⁻¹
            let dj_inv = match j {
                0 => ai,
                1 => a,
                _ => 1 % r.modulus,
            };
            out.set(i, j, r.mul(r.mul(scale(i), g.get(i, j)), dj_inv));
        }
    }
    Ok(out)
}

/// Symplectic transvection `x ↦ x + ⟨v, x⟩ v`.
pub fn transvection(v: &[u64], r: &Ring) -> RingMatrix {
    let n = v.len();
    let mut t = RingMatrix::identity(n).scale(1, r);
    for j in 0..n {
        let mut ej = vec![0; n];
        ej[j] = 1 % r.modulus;
        let s = form(v, &ej, r);
        for i in 0..n {
            t.set(i, j, r.add(t.get(i, j), r.mul(s, v[i])));
        }
    }
    t
}

/// Transvections along `e_i` and `e_i + e_j`, which generate `Sp_{2n}` over a field.
pub fn sp_even_generators(n: usize, r: &Ring) -> Vec<RingMatrix> {
    let d = 2 * n;
    let mut gens = Vec::new();
    for i in 0..d {
        let mut v = vec![0; d];
        v[i] = 1;
        gens.push(transvection(&v, r));
    }
    for i in 0..d {
        for j in i + 1..d {
            let mut v = vec![0; d];
            v[i] = 1;
            v[j] = 1;
            gens.push(transvection(&v, r));
        }
    }
    gens
}

/// Generators of `Sp_{2n+1}`: `c = 1`, `u = e_i`, and the embedded `Sp_{2n}` generators.
pub fn sp_odd_generators(n: usize, r: &Ring) -> Vec<RingMatrix> {
    let mut gens = vec![odd_compose(1, &vec![0; 2 * n], &SpElement::identity(n), r)];
    for i in 0..2 * n {
        let mut u = vec![0; 2 * n];
        u[i] = 1;
        gens.push(odd_compose(0, &u, &SpElement::identity(n), r));
    }
    for m in sp_even_generators(n, r) {
        gens.push(embed(&m, 2 * n, 2 * n + 1, r).unwrap());
    }
    gens
}

/// Generators of `Sp_k` for any `k`, as matrices of size `matrix_size(k)`.
pub fn sp_generators(k: usize, r: &Ring) -> Vec<RingMatrix> {
    if k == 0 {
        return vec![RingMatrix::zeros(0, 0)];
    }
    if k % 2 == 0 {
        sp_even_generators(k / 2, r)
    } else {
        sp_odd_generators(k / 2, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        let r = Ring::prime_field(3).unwrap();
        assert_eq!(standard_symplectic_form(1, &r), RingMatrix::from_rows(&r, &[vec![0, 1], vec![-1, 0]]));
        assert_eq!(standard_symplectic_form(0, &r).rows, 0);
        let p2 = standard_symplectic_form(1, &r);
        assert_eq!(standard_symplectic_form(2, &r), p2.direct_sum(&p2));
    }

    #[test]
    fn symplectic_tests() {
        let r = Ring::prime_field(3).unwrap();
        assert!(is_symplectic(&RingMatrix::identity(4), &r).unwrap());
        assert!(is_symplectic(&RingMatrix::from_rows(&r, &[vec![1, 1], vec![0, 1]]), &r).unwrap());
        assert!(!is_symplectic(&RingMatrix::diag(&[2, 1]), &r).unwrap());
        assert_eq!(is_symplectic(&RingMatrix::identity(3), &r), Err(Error::OddSize(3)));
    }

    #[test]
    fn odd_elements() {
        let r = Ring::prime_field(5).unwrap();
        let m = SpElement::new(RingMatrix::from_rows(&r, &[vec![2, 1], vec![1, 1]]), &r).unwrap();
        let a = odd_compose(3, &[1, 4], &m, &r);
        assert!(is_symplectic(&a, &r).unwrap());
        assert_eq!(a.col(0), vec![1, 0, 0, 0]);
        let g = odd_decompose(&a, &r).unwrap();
        assert_eq!((g.c, g.u.clone(), g.m.clone()), (3, vec![1, 4], m));
        assert_eq!(odd_compose(0, &[0, 0], &SpElement::identity(1), &r), RingMatrix::identity(4));
        assert_eq!(odd_decompose(&RingMatrix::from_rows(&r, &[vec![0, 1], vec![-1, 0]]), &r).err(), Some(Error::NotOddSymplectic));
    }

    #[test]
    fn embeddings() {
        let r = Ring::prime_field(3).unwrap();
        let e = embed(&RingMatrix::zeros(0, 0), 0, 2, &r).unwrap();
        assert_eq!(e, RingMatrix::identity(2));
        let m = RingMatrix::from_rows(&r, &[vec![1, 1], vec![0, 1]]);
        let e = embed(&m, 2, 3, &r).unwrap();
        let g = odd_decompose(&e, &r).unwrap();
        assert_eq!((g.c, g.u.clone(), g.m.mat.clone()), (0, vec![0, 0], m.clone()));
        // Sp₁ = {[[1,c],[0,1]]} sits in Sp₂ as itself
        let c = RingMatrix::from_rows(&r, &[vec![1, 2], vec![0, 1]]);
        assert_eq!(embed(&c, 1, 2, &r).unwrap(), c);
        assert_eq!(embed(&m, 2, 1, &r), Err(Error::RankOrder { r: 2, s: 1 }));
    }

    #[test]
    fn conjugation_matches_monoid_action() {
        let r = Ring::prime_field(5).unwrap();
        let g = OddSpElement { c: 2, u: vec![3, 1], m: SpElement::identity(1) };
        for a in 1..5 {
            let lhs = conj_diag(a, &g.to_matrix(&r), &r).unwrap();
            assert_eq!(lhs, monoid_act(a, &g, &r).to_matrix(&r));
        }
        assert_eq!(monoid_act(0, &g, &r), OddSpElement { c: 0, u: vec![0, 0], m: SpElement::identity(1) });
        assert!(conj_diag(0, &g.to_matrix(&r), &r).is_err());
    }
}
