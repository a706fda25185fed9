//! The reduced monoid ring `Z₀[R] = Z[R,·,1]/Z⟨0⟩`, polynomials over `R`,
//! the elements `s_p(a)` and the maps `φ_t`.

use crate::error::{Error, Result};
use crate::ring::{cyclic_tensor_power, Ring};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Finite integer combination `Σ n_a ⟨a⟩` with `a ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Z0RRaw")]
pub struct Z0RElem {
    coeffs: BTreeMap<u64, i64>,
}

#[derive(Deserialize)]
struct Z0RRaw {
    coeffs: BTreeMap<u64, i64>,
}

impl TryFrom<Z0RRaw> for Z0RElem {
    type Error = String;
    fn try_from(raw: Z0RRaw) -> std::result::Result<Self, String> {
        Ok(Z0RElem::from_terms(raw.coeffs))
    }
}

impl Z0RElem {
    pub fn zero() -> Self {
        Z0RElem::default()
    }

    pub fn one() -> Self {
        Z0RElem::basis(1)
    }

    /// `⟨a⟩`, which is zero for `a = 0`. `a` must be canonical.
    pub fn basis(a: u64) -> Self {
        Z0RElem::from_terms([(a, 1)])
    }

    /// `n·⟨1⟩`.
    pub fn integer(n: i64) -> Self {
        Z0RElem::from_terms([(1, n)])
    }

    /// Collects terms, dropping `⟨0⟩` and zero coefficients.
    pub fn from_terms<I: IntoIterator<Item = (u64, i64)>>(terms: I) -> Self {
        let mut coeffs = BTreeMap::new();
        for (a, n) in terms {
            if a == 0 || n == 0 {
                continue;
            }
            let e = coeffs.entry(a).or_insert(0i64);
            *e = e.checked_add(n).expect("coefficient overflow");
            if *e == 0 {
                coeffs.remove(&a);
            }
        }
        Z0RElem { coeffs }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.coeffs.iter().map(|(&a, &n)| (a, n))
    }

    pub fn coeff(&self, a: u64) -> i64 {
        self.coeffs.get(&a).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn add(&self, o: &Z0RElem) -> Z0RElem {
        Z0RElem::from_terms(self.terms().chain(o.terms()))
    }

    pub fn sub(&self, o: &Z0RElem) -> Z0RElem {
        Z0RElem::from_terms(self.terms().chain(o.terms().map(|(a, n)| (a, -n))))
    }

    pub fn neg(&self) -> Z0RElem {
        Z0RElem::from_terms(self.terms().map(|(a, n)| (a, -n)))
    }

    pub fn scale(&self, k: i64) -> Z0RElem {
        Z0RElem::from_terms(self.terms().map(|(a, n)| (a, n.checked_mul(k).expect("coefficient overflow"))))
    }

    pub fn mul(&self, o: &Z0RElem, r: &Ring) -> Z0RElem {
        let mut terms = Vec::with_capacity(self.support_len() * o.support_len());
        for (a, n) in self.terms() {
            for (b, m) in o.terms() {
                terms.push((r.mul(a, b), n.checked_mul(m).expect("coefficient overflow")));
            }
        }
        Z0RElem::from_terms(terms)
    }

    pub fn pow(&self, e: u32, r: &Ring) -> Z0RElem {
        (0..e).fold(Z0RElem::one(), |acc, _| acc.mul(self, r))
    }

    /// `Some(u)` if the element is exactly `⟨u⟩`.
    pub fn as_basis(&self) -> Option<u64> {
        match self.coeffs.iter().next() {
            Some((&a, &1)) if self.coeffs.len() == 1 => Some(a),
            _ => None,
        }
    }

    /// Sum of coefficients (the augmentation `⟨a⟩ ↦ 1`).
    pub fn augmentation(&self) -> i64 {
        self.terms().map(|(_, n)| n).sum()
    }

    /// Image under the ring map induced by `a ↦ f(a)` on the monoid.
    pub fn map_monoid(&self, f: impl Fn(u64) -> u64) -> Z0RElem {
        Z0RElem::from_terms(self.terms().map(|(a, n)| (f(a), n)))
    }
}

impl fmt::Display for Z0RElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (a, n) in self.terms() {
            let sign = if n < 0 { "-" } else if first { "" } else { "+" };
            let mag = n.unsigned_abs();
            if mag == 1 {
                write!(f, "{sign}<{a}>")?;
            } else {
                write!(f, "{sign}{mag}<{a}>")?;
            }
            first = false;
        }
        Ok(())
    }
}

/// `⟨u⟩ ↦ ⟨u⁻¹⟩` for a unit `u`.
pub fn basis_unit_inverse(x: &Z0RElem, r: &Ring) -> Result<Z0RElem> {
    let u = x.as_basis().ok_or(Error::NotBasisUnit)?;
    if !r.is_unit(u) {
        return Err(Error::NotBasisUnit);
    }
    Ok(Z0RElem::basis(r.inv(u)?))
}

pub fn z0_mul(x: &Z0RElem, y: &Z0RElem, r: &Ring) -> Z0RElem {
    x.mul(y, r)
}

/// Polynomial over `R`, lowest degree first, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyR {
    coeffs: Vec<u64>,
}

impl PolyR {
    pub fn new(r: &Ring, coeffs: &[i64]) -> Self {
        PolyR::from_canonical(coeffs.iter().map(|&c| r.reduce(c)).collect())
    }

    pub fn from_canonical(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PolyR { coeffs }
    }

    pub fn zero() -> Self {
        PolyR { coeffs: vec![] }
    }

    pub fn constant(c: u64) -> Self {
        PolyR::from_canonical(vec![c])
    }

    /// The polynomial `X`.
    pub fn x() -> Self {
        PolyR { coeffs: vec![0, 1] }
    }

    /// `X^d`.
    pub fn monomial(d: usize) -> Self {
        let mut c = vec![0; d + 1];
        c[d] = 1;
        PolyR { coeffs: c }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Degree, with the zero polynomial of degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn eval(&self, t: u64, r: &Ring) -> u64 {
        self.coeffs.iter().rev().fold(0, |acc, &c| r.add(r.mul(acc, t), c))
    }

    pub fn add(&self, o: &PolyR, r: &Ring) -> PolyR {
        let n = self.coeffs.len().max(o.coeffs.len());
        PolyR::from_canonical((0..n).map(|i| r.add(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn scale(&self, a: u64, r: &Ring) -> PolyR {
        PolyR::from_canonical(self.coeffs.iter().map(|&c| r.mul(c, a)).collect())
    }

    pub fn mul(&self, o: &PolyR, r: &Ring) -> PolyR {
        if self.is_zero() || o.is_zero() {
            return PolyR::zero();
        }
        let mut c = vec![0; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                c[i + j] = r.add(c[i + j], r.mul(a, b));
            }
        }
        PolyR::from_canonical(c)
    }

    /// `X^d · p(1/X)` for `d ≥ deg p`.
    pub fn reversed(&self, d: usize) -> PolyR {
        assert!(d >= self.degree() || self.is_zero());
        let mut c = vec![0; d + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            c[d - i] = a;
        }
        PolyR::from_canonical(c)
    }
}

impl fmt::Display for PolyR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}X"),
                _ => format!("{c}X^{i}"),
            })
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// Partial sums `a_J = Σ_{j∈J} a_j` for every nonempty `J`, indexed by bitmask.
fn subset_sums(a: &[u64], r: &Ring) -> Vec<u64> {
    let m = a.len();
    assert!(m < 31, "sequence too long");
    let mut sums = vec![0u64; 1 << m];
    for mask in 1usize..(1 << m) {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = r.add(sums[mask & (mask - 1)], a[low]);
    }
    sums
}

fn subset_sign(mask: usize) -> i64 {
    // −(−1)^{|J|}
    if mask.count_ones() % 2 == 1 {
        1
    } else {
        -1
    }
}

/// `s_p(a) = −Σ_{∅≠J} (−1)^{|J|} ⟨p(a_J)⟩` in `Z₀[R]`.
pub fn s_poly(a: &[u64], p: &PolyR, r: &Ring) -> Z0RElem {
    let sums = subset_sums(a, r);
    Z0RElem::from_terms((1..sums.len()).map(|mask| (p.eval(sums[mask], r), subset_sign(mask))))
}

/// `φ_t(Σ n_i⟨a_i⟩) = Σ n_i a_i^t` in `R^{⊗t} ≅ Z/p^k`.
pub fn phi_t(x: &Z0RElem, t: u32, r: &Ring) -> u64 {
    let ct = cyclic_tensor_power(r, t);
    let m = ct.modulus() as i128;
    let s: i128 = x.terms().map(|(a, n)| n as i128 * ct.map(a) as i128).sum();
    s.rem_euclid(m) as u64
}

/// Checks the alternating-sum identity for the canonical multilinear map
/// `R^t → R^{⊗t}` applied to `(p₁(x_J), …, p_t(x_J))`.
pub fn multlin_verify(x: &[u64], polys: &[PolyR], r: &Ring) -> Result<bool> {
    let m = x.len();
    let sum: usize = polys.iter().map(|p| p.degree()).sum();
    if m == 0 || sum >= m {
        return Err(Error::DegreeBound { sum, m });
    }
    let sums = subset_sums(x, r);
    let prod_at = |t: u64| polys.iter().fold(1u64, |acc, p| r.mul(acc, p.eval(t, r)));
    let mut lhs: i128 = 0;
    for (mask, &s) in sums.iter().enumerate().skip(1) {
        lhs += subset_sign(mask) as i128 * prod_at(s) as i128;
    }
    let lhs = lhs.rem_euclid(r.modulus as i128) as u64;
    Ok(lhs == prod_at(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z9() -> Ring {
        Ring::parse("3^2").unwrap()
    }

    #[test]
    fn multiplication() {
        let r = z9();
        assert!(z0_mul(&Z0RElem::basis(3), &Z0RElem::basis(3), &r).is_zero());
        assert_eq!(z0_mul(&Z0RElem::basis(2), &Z0RElem::basis(5), &r), Z0RElem::one());
        let x = Z0RElem::from_terms([(1, 1), (2, 1)]);
        assert_eq!(x.mul(&x, &r), Z0RElem::from_terms([(1, 1), (2, 2), (4, 1)]));
        assert!(Z0RElem::basis(0).is_zero());
    }

    #[test]
    fn unit_inverse() {
        let r = z9();
        assert_eq!(basis_unit_inverse(&Z0RElem::basis(2), &r).unwrap(), Z0RElem::basis(5));
        assert_eq!(basis_unit_inverse(&Z0RElem::one(), &r).unwrap(), Z0RElem::one());
        assert_eq!(basis_unit_inverse(&Z0RElem::basis(3), &r), Err(Error::NotBasisUnit));
        assert_eq!(basis_unit_inverse(&Z0RElem::integer(2), &r), Err(Error::NotBasisUnit));
    }

    #[test]
    fn s_poly_examples() {
        let f5 = Ring::prime_field(5).unwrap();
        for m in 1..5 {
            let a: Vec<u64> = (0..m).map(|i| (i as u64 * 3 + 1) % 5).collect();
            assert_eq!(s_poly(&a, &PolyR::constant(1), &f5), Z0RElem::one());
        }
        let p = PolyR::new(&f5, &[1, 2, 3]);
        assert_eq!(s_poly(&[4], &p, &f5), Z0RElem::basis(p.eval(4, &f5)));
        let s = s_poly(&[1, 2], &PolyR::x(), &f5);
        assert_eq!(s, Z0RElem::from_terms([(1, 1), (2, 1), (3, -1)]));
    }

    #[test]
    fn phi_examples() {
        let f5 = Ring::prime_field(5).unwrap();
        assert_eq!(phi_t(&Z0RElem::basis(3), 2, &f5), 4);
        let s = s_poly(&[2, 4], &PolyR::x(), &f5);
        assert_eq!(phi_t(&s, 1, &f5), 0);
    }

    #[test]
    fn multlin_examples() {
        let r = z9();
        assert!(multlin_verify(&[1, 4, 7], &[PolyR::x()], &r).unwrap());
        let cs = [PolyR::constant(2), PolyR::constant(5)];
        assert!(multlin_verify(&[3, 1], &cs, &r).unwrap());
        assert_eq!(
            multlin_verify(&[1], &[PolyR::x()], &r),
            Err(Error::DegreeBound { sum: 1, m: 1 })
        );
    }

    #[test]
    fn serde_shape() {
        let x = Z0RElem::from_terms([(2, 3), (1, -1)]);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"coeffs":{"1":-1,"2":3}}"#);
        let y: Z0RElem = serde_json::from_str(r#"{"coeffs":{"0":5,"2":3,"1":-1}}"#).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn reversal() {
        let r = Ring::prime_field(7).unwrap();
        let p = PolyR::new(&r, &[1, 2]);
        assert_eq!(p.reversed(2).coeffs(), &[0, 2, 1]);
        assert_eq!(PolyR::new(&r, &[0, 0]).degree(), 0);
    }
}
