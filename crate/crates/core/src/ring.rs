//! Local rings `Z/p^k` and prime fields.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RingKind {
    ZMod,
    PrimeField,
}

/// `Z/p^k`; elements are canonical residues in `[0, p^k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ring {
    pub kind: RingKind,
    pub p: u64,
    pub k: u32,
    pub modulus: u64,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `n` as `p^k` if possible.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n && n % p != 0 {
        p += 1;
    }
    if n % p != 0 {
        p = n;
    }
    let (mut m, mut k) = (n, 0);
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

pub fn make_local_ring(p: u64, k: u32) -> Result<Ring> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k == 0 {
        return Err(Error::ZeroExponent);
    }
    let modulus = p
        .checked_pow(k)
        .filter(|m| *m < (1 << 16))
        .ok_or(Error::CapExceeded(1 << 16))?;
    let kind = if k == 1 { RingKind::PrimeField } else { RingKind::ZMod };
    Ok(Ring { kind, p, k, modulus })
}

impl Ring {
    pub fn prime_field(p: u64) -> Result<Ring> {
        make_local_ring(p, 1)
    }

    /// Parses `"p"` or `"p^k"`.
    pub fn parse(text: &str) -> Result<Ring> {
        let text = text.trim();
        let (base, exp) = match text.split_once('^') {
            Some((b, e)) => (b, e),
            None => (text, "1"),
        };
        let b: u64 = base.trim().parse().map_err(|_| Error::NotPrimePower(0))?;
        let e: u32 = exp.trim().parse().map_err(|_| Error::NotPrimePower(b))?;
        if e == 1 {
            return match prime_power(b) {
                Some((p, k)) => make_local_ring(p, k),
                None => Err(Error::NotPrimePower(b)),
            };
        }
        if !is_prime(b) {
            return Err(Error::NotPrimePower(b));
        }
        make_local_ring(b, e)
    }

    pub fn size(&self) -> u64 {
        self.modulus
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> + Clone {
        0..self.modulus
    }

    pub fn units(&self) -> impl Iterator<Item = u64> + Clone {
        let p = self.p;
        (1..self.modulus).filter(move |x| x % p != 0)
    }

    pub fn unit_count(&self) -> u64 {
        self.modulus - self.modulus / self.p
    }

    pub fn maximal_ideal(&self) -> Vec<u64> {
        (0..self.modulus).step_by(self.p as usize).collect()
    }

    #[inline]
    pub fn reduce(&self, x: i64) -> u64 {
        x.rem_euclid(self.modulus as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.modulus
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.modulus - b) % self.modulus
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        (self.modulus - a) % self.modulus
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.modulus
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let (mut base, mut acc) = (a % self.modulus, 1 % self.modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    #[inline]
    pub fn is_unit(&self, a: u64) -> bool {
        a % self.p != 0
    }

    /// Image in the residue field `F_p`.
    #[inline]
    pub fn residue(&self, a: u64) -> u64 {
        a % self.p
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        unit_inverse(self, a)
    }

    /// Centered representative in `(-m/2, m/2]`.
    #[inline]
    pub fn centered(&self, a: u64) -> i64 {
        let m = self.modulus as i64;
        let a = a as i64;
        if 2 * a > m {
            a - m
        } else {
            a
        }
    }
}

impl std::fmt::Display for Ring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            RingKind::PrimeField => write!(f, "F_{}", self.p),
            RingKind::ZMod => write!(f, "Z/{}^{}", self.p, self.k),
        }
    }
}

pub fn unit_inverse(r: &Ring, x: u64) -> Result<u64> {
    let x = x % r.modulus;
    if !r.is_unit(x) {
        return Err(Error::NotAUnit(x));
    }
    let (mut a, mut b) = (x as i64, r.modulus as i64);
    let (mut s0, mut s1) = (1i64, 0i64);
    while b != 0 {
        let q = a / b;
        (a, b) = (b, a - q * b);
        (s0, s1) = (s1, s0 - q * s1);
    }
    Ok(r.reduce(s0))
}

/// `R^{⊗t}` for cyclic `R`, realized as `Z/p^k` with `a^{⊗t} ↦ a^t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CyclicTensorPower {
    pub ring: Ring,
    pub t: u32,
}

impl CyclicTensorPower {
    pub fn modulus(&self) -> u64 {
        self.ring.modulus
    }

    pub fn map(&self, a: u64) -> u64 {
        self.ring.pow(a, self.t as u64)
    }
}

pub fn cyclic_tensor_power(r: &Ring, t: u32) -> CyclicTensorPower {
    assert!(t >= 1);
    CyclicTensorPower { ring: *r, t }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction() {
        let f3 = make_local_ring(3, 1).unwrap();
        assert_eq!(f3.unit_count(), 2);
        assert_eq!(f3.kind, RingKind::PrimeField);
        let z9 = make_local_ring(3, 2).unwrap();
        assert_eq!(z9.units().count(), 6);
        assert_eq!(make_local_ring(2, 2).unwrap().maximal_ideal(), vec![0, 2]);
        assert_eq!(make_local_ring(6, 1), Err(Error::NotPrime(6)));
    }

    #[test]
    fn inverses() {
        let z9 = make_local_ring(3, 2).unwrap();
        assert_eq!(unit_inverse(&z9, 2), Ok(5));
        assert_eq!(unit_inverse(&z9, 3), Err(Error::NotAUnit(3)));
        let f5 = make_local_ring(5, 1).unwrap();
        assert_eq!(unit_inverse(&f5, 4), Ok(4));
        for r in [z9, f5, make_local_ring(2, 3).unwrap()] {
            for u in r.units() {
                assert_eq!(r.mul(u, r.inv(u).unwrap()), 1);
            }
        }
    }

    #[test]
    fn parsing() {
        assert_eq!(Ring::parse("3^2").unwrap().modulus, 9);
        assert_eq!(Ring::parse("9").unwrap().k, 2);
        assert_eq!(Ring::parse("6"), Err(Error::NotPrimePower(6)));
        assert!(Ring::parse("4^2").is_err());
    }

    #[test]
    fn tensor_power() {
        let f5 = make_local_ring(5, 1).unwrap();
        assert_eq!(cyclic_tensor_power(&f5, 2).map(2), 4);
        assert_eq!(cyclic_tensor_power(&f5, 1).map(3), 3);
        let z4 = make_local_ring(2, 2).unwrap();
        assert_eq!(cyclic_tensor_power(&z4, 2).map(2), 0);
    }
}
